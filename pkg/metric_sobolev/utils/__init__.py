"""Load util modules into parent package."""

from . import saving
from . import validating
