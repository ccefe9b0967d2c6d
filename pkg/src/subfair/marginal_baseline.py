"""Marginal-fairness baseline: same dynamics, restricted auditor.

Runs the fictitious-play engine with the auditor searching exactly over the
finite marginal group family (single protected attributes) instead of all
linear-threshold subgroups.  Traces additionally carry the rich subgroup
violation of the same mixtures, computed by the heuristic subgroup auditor,
so marginal and subgroup unfairness can be compared point by point.
"""

from __future__ import annotations

from .auditor import audit_marginal, build_marginal_family
from .dataset import Dataset
from .fictplay import (FictPlayConfig, MixtureClassifier, RunOutput,
                       TraceRecord, default_auditor, run_full, run_shared)

# Re-exported here because the family defines this baseline's constraint set.
__all__ = ["build_marginal_family", "marginal_auditor", "run_marginal",
           "run_marginal_full", "run_marginal_shared"]


def marginal_auditor(data: Dataset):
    """Exact marginal auditor with the group family built once."""
    family = build_marginal_family(data)

    def audit(D, predictions):
        return audit_marginal(D, data, family=family, predictions=predictions)

    return audit


def run_marginal_full(data: Dataset, config: FictPlayConfig) -> RunOutput:
    return run_full(
        data, config,
        audit_fn=marginal_auditor(data),
        rich_audit_fn=default_auditor(data),
        algorithm="marginal",
    )


def run_marginal_shared(data: Dataset, config: FictPlayConfig, gammas) -> dict[float, RunOutput]:
    return run_shared(
        data, config, gammas,
        audit_fn=marginal_auditor(data),
        rich_audit_fn=default_auditor(data),
        algorithm="marginal",
    )


def run_marginal(data: Dataset, config: FictPlayConfig) -> tuple[MixtureClassifier, list[TraceRecord]]:
    """Train under marginal constraints; trace rows include rich_gamma."""
    output = run_marginal_full(data, config)
    return output.mixture, output.records
