"""Group-fairness disparity estimation for binary classifiers.

Supervised, semi-supervised (Infairness) and Beta-calibration estimators of
TPR, FPR, PPV, NPV, F1, accuracy and Brier-score disparities between two
groups, plus the simulation study used to check them.
"""

import json

from ._core import (
    ALL_METRICS,
    AuditDataset,
    DegenerateGroupError,
    Error,
    GroupedEstimate,
    GroupMoments,
    InputError,
    InsufficientDataError,
    Method,
    Metric,
    MetricEstimate,
    SolverError,
    audit_csv_json,
    classify,
    disparity,
    estimate_infairness,
    estimate_ji,
    estimate_supervised,
    group_moments,
    metric_from_moments,
    relative_efficiency,
    run_study_json,
    simulate_dataset,
)


def run_study(scenario, **kwargs):
    """Simulation study summary as a dict (see run_study_json for options)."""
    return json.loads(run_study_json(scenario, **kwargs))


def audit_csv(path, outcome, score, group, **kwargs):
    """Audit report for a CSV file as a dict (see audit_csv_json for options)."""
    return json.loads(audit_csv_json(path, outcome, score, group, **kwargs))


__all__ = [
    "ALL_METRICS",
    "AuditDataset",
    "DegenerateGroupError",
    "Error",
    "GroupedEstimate",
    "GroupMoments",
    "InputError",
    "InsufficientDataError",
    "Method",
    "Metric",
    "MetricEstimate",
    "SolverError",
    "audit_csv",
    "audit_csv_json",
    "classify",
    "disparity",
    "estimate_infairness",
    "estimate_ji",
    "estimate_supervised",
    "group_moments",
    "metric_from_moments",
    "relative_efficiency",
    "run_study",
    "run_study_json",
    "simulate_dataset",
]
