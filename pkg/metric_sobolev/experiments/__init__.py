"""
Import experiment modules and create valid experiment dict.
"""

from . import base
from .clarkson_suite import ClarksonSuite
from .diagnostics_suite import DiagnosticsSuite
from .energy_ladder import EnergyLadderExperiment
from .flow_run import FlowRun
from .hopflax_suite import HopfLaxSuite
from .partition_audit import PartitionAudit
from .snowflake_demo import SnowflakeDemo
from .wug_audit import WugAudit

available_experiments = {
    experiment.experiment_name: experiment
    for experiment in (
        PartitionAudit,
        EnergyLadderExperiment,
        ClarksonSuite,
        HopfLaxSuite,
        WugAudit,
        DiagnosticsSuite,
        FlowRun,
        SnowflakeDemo,
    )
}

available_experiments = dict(map(tuple, sorted(available_experiments.items())))
