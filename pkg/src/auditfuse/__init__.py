"""Audit-bit based distributed Bayesian detection under Byzantine attacks.

Subpackages:

* :mod:`auditfuse.model` -- domain types, configuration, validation.
* :mod:`auditfuse.events` -- closed-form event algebra of one audit group.
* :mod:`auditfuse.oracle` -- exact enumeration oracle (ground truth).
* :mod:`auditfuse.analytic` -- fusion weights, thresholds, error probabilities.
* :mod:`auditfuse.as_printed` -- published polynomial transcriptions + diagnostic.
* :mod:`auditfuse.simcore` -- Monte Carlo simulator.
* :mod:`auditfuse.adversary` -- attacker-side grid optimizer.
* :mod:`auditfuse.clusternet` -- multi-cluster report protocol and overhead ledger.
* :mod:`auditfuse.cli` -- command-line experiment runner.
"""

from .model import (
    AttackParams,
    ConfigError,
    DetectionParams,
    GroupTranscript,
    IdentityMode,
    NetworkConfig,
    Scheme,
    SensorState,
    SetLabel,
    TasLabel,
    ThresholdMode,
    load_config,
    validate,
)
from .analytic import (
    ConditionalPmf,
    SchemePerformance,
    blinding_condition,
    bhattacharyya_distance,
    conditional_pmf,
    eas_posterior,
    expected_transmitted_bits,
    group_vote_pmf,
    intelligent_posterior,
    llr_weight,
    mismatch_ratio_F,
    scheme_performance,
    tas_posterior,
)
from .oracle import (
    JointOutcomeTable,
    conditional_decision_pmf,
    enumerate_group,
    posterior_from_oracle,
)
from .simcore import EmpiricalPerf, TrialRecord, fuse, run_experiment, run_trial

__version__ = "0.1.0"

__all__ = [
    "AttackParams", "ConfigError", "DetectionParams", "GroupTranscript",
    "IdentityMode", "NetworkConfig", "Scheme", "SensorState", "SetLabel",
    "TasLabel", "ThresholdMode", "load_config", "validate",
    "ConditionalPmf", "SchemePerformance", "blinding_condition",
    "bhattacharyya_distance", "conditional_pmf", "eas_posterior",
    "expected_transmitted_bits", "group_vote_pmf", "intelligent_posterior",
    "llr_weight", "mismatch_ratio_F", "scheme_performance", "tas_posterior",
    "JointOutcomeTable", "conditional_decision_pmf", "enumerate_group",
    "posterior_from_oracle",
    "EmpiricalPerf", "TrialRecord", "fuse", "run_experiment", "run_trial",
    "__version__",
]
