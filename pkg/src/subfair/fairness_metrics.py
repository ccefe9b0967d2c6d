"""False-positive subgroup fairness metrics and the Lagrangian game payoff.

All probabilities are empirical frequencies over the given dataset.  For a
classifier mixture D and a subgroup g over protected attributes:

    alpha(g)      = Pr[g(x) = 1, y = 0]
    FP(D)         = E[D(X) | y = 0]            (base false-positive rate)
    FP(D, g)      = E[D(X) | g(x) = 1, y = 0]  (group false-positive rate)
    beta(g, D)    = |FP(D) - FP(D, g)|
    gamma-unfairness(g, D) = alpha(g) * beta(g, D)

The two-sided constraint slacks are

    phi_plus  = alpha * (FP(D) - FP(D, g)) - gamma
    phi_minus = alpha * (FP(D, g) - FP(D)) - gamma

and the game payoff for a hypothesis h against dual weights lambda is

    U(h, lambda) = err(h) + sum_g (lambda_g_plus * phi_plus + lambda_g_minus * phi_minus).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .regression_oracle import CscInstance, LinearThreshold


@dataclass
class MixtureClassifier:
    """A uniform mixture over linear threshold hypotheses.

    Evaluated exactly via expected predictions, never by sampling.
    """

    hypotheses: list[LinearThreshold]

    def __post_init__(self):
        if not self.hypotheses:
            raise ValueError("mixture must contain at least one hypothesis")

    def __len__(self):
        return len(self.hypotheses)

    def expected_predictions(self, X: np.ndarray) -> np.ndarray:
        total = np.zeros(np.asarray(X).shape[0], dtype=np.int64)
        for h in self.hypotheses:
            total += h.predict(X)
        return total / len(self.hypotheses)


def group_indicator(group, data: Dataset) -> np.ndarray:
    """0/1 membership of each row in a subgroup over protected attributes."""
    if hasattr(group, "indicator"):
        return np.asarray(group.indicator(data), dtype=np.int64)
    return group.predict(data.x)


def expected_predictions(D: MixtureClassifier, data: Dataset) -> np.ndarray:
    """p_i = fraction of mixture members predicting 1 on row i."""
    return D.expected_predictions(data.features)


def error_rate(p: np.ndarray, y: np.ndarray) -> float:
    """Misclassification rate of (possibly fractional) predictions p."""
    p = np.asarray(p, dtype=float)
    y = np.asarray(y)
    if p.shape != y.shape:
        raise ValueError("predictions and labels must have equal length")
    return float(np.mean(np.where(y == 1, 1.0 - p, p)))


def fp_rate(p: np.ndarray, y: np.ndarray, mask: np.ndarray | None = None) -> float:
    """Mean prediction over negative rows, optionally restricted by a mask.

    A mask selecting no negative rows falls back to the base rate, which
    makes empty subgroups trivially fair (beta = 0).
    """
    p = np.asarray(p, dtype=float)
    y = np.asarray(y)
    negatives = y == 0
    if not np.any(negatives):
        raise ValueError("false-positive rate undefined without negative rows")
    if mask is not None:
        selected = negatives & (np.asarray(mask) == 1)
        if not np.any(selected):
            return fp_rate(p, y)
        return float(np.mean(p[selected]))
    return float(np.mean(p[negatives]))


@dataclass
class FairnessReport:
    """One subgroup's fairness record: value = alpha * beta."""

    alpha: float
    fp_base: float
    fp_group: float
    beta: float
    value: float
    disparity: float  # signed: fp_group - fp_base
    group_id: int = -1

    CSV_HEADER = "group_id,alpha,fp_base,fp_group,beta,gamma_unfairness"

    def csv_row(self, fmt="%.9g") -> str:
        nums = ",".join(fmt % v for v in
                        (self.alpha, self.fp_base, self.fp_group, self.beta, self.value))
        return f"{self.group_id},{nums}"


def gamma_unfairness(D: MixtureClassifier, g, data: Dataset,
                     predictions: np.ndarray | None = None) -> FairnessReport:
    """gamma-unfairness of subgroup g under mixture D.

    `predictions` lets callers reuse precomputed expected predictions of D;
    the result is identical to recomputing them.
    """
    p = expected_predictions(D, data) if predictions is None else predictions
    mask = group_indicator(g, data)
    alpha = float(np.mean((mask == 1) & (data.y == 0)))
    fp_base = fp_rate(p, data.y)
    fp_group = fp_rate(p, data.y, mask)
    beta = abs(fp_base - fp_group)
    return FairnessReport(
        alpha=alpha,
        fp_base=fp_base,
        fp_group=fp_group,
        beta=beta,
        value=alpha * beta,
        disparity=fp_group - fp_base,
    )


def phi_constraints(D: MixtureClassifier, g, gamma: float, data: Dataset,
                    predictions: np.ndarray | None = None) -> tuple[float, float]:
    """Constraint slacks (phi_plus, phi_minus); positive means violated."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    rep = gamma_unfairness(D, g, data, predictions=predictions)
    phi_plus = rep.alpha * (rep.fp_base - rep.fp_group) - gamma
    phi_minus = rep.alpha * (rep.fp_group - rep.fp_base) - gamma
    return phi_plus, phi_minus


class GroupRegistry:
    """Run-local store of auditor-discovered subgroups.

    Groups are deduplicated by exact identity only (no tolerance merging).
    Each keeps its cached 0/1 membership vector on the run's dataset, plus
    the negative-row slice of it and Pr[g(x)=1 | y=0], so the per-round
    learner cost assembly touches only negative rows.
    """

    def __init__(self):
        self.groups: list = []
        self.indicators: list[np.ndarray] = []
        self.negative_members: list[np.ndarray] = []
        self.negative_probs: list[float] = []
        self._ids: dict[tuple, int] = {}

    def __len__(self):
        return len(self.groups)

    def register(self, group, data: Dataset) -> int:
        key = group.key()
        gid = self._ids.get(key)
        if gid is None:
            gid = len(self.groups)
            self._ids[key] = gid
            self.groups.append(group)
            member = group_indicator(group, data)
            on_negatives = member[data.y == 0]
            self.indicators.append(member)
            self.negative_members.append(on_negatives.astype(float))
            self.negative_probs.append(float(np.mean(on_negatives == 1)))
        return gid

    def group(self, gid: int):
        return self.groups[gid]

    def indicator(self, gid: int) -> np.ndarray:
        return self.indicators[gid]

    def clone(self) -> "GroupRegistry":
        other = GroupRegistry()
        other.groups = list(self.groups)
        other.indicators = list(self.indicators)
        other.negative_members = list(self.negative_members)
        other.negative_probs = list(self.negative_probs)
        other._ids = dict(self._ids)
        return other


@dataclass
class DualVector:
    """Sparse dual weights: group id -> (lambda_plus, lambda_minus), each in [0, C]."""

    registry: GroupRegistry
    bound: float
    entries: dict[int, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        if self.bound <= 0:
            raise ValueError("dual bound C must be positive")
        for gid, (lp, lm) in self.entries.items():
            if not (0.0 <= lp <= self.bound and 0.0 <= lm <= self.bound):
                raise ValueError(f"dual entry for group {gid} outside [0, C]")

    def infinity_norm(self) -> float:
        if not self.entries:
            return 0.0
        return max(max(lp, lm) for lp, lm in self.entries.values())


def learner_costs(dual: DualVector, data: Dataset) -> CscInstance:
    """The learner's CSC instance for the current average dual vector.

    Predicting 1 costs -1/n on positives.  On negatives it costs 1/n plus,
    for each weighted subgroup, (lambda_plus - lambda_minus)/n times
    (Pr[g(x)=1 | y=0] - 1[g(x_i)=1]).  Predicting 0 costs 0 everywhere.
    """
    n = data.n
    negatives = data.y == 0
    registry = dual.registry
    c1 = np.where(data.y == 1, -1.0 / n, 1.0 / n)
    c1_negatives = c1[negatives]
    for gid, (lp, lm) in dual.entries.items():
        weight = lp - lm
        if weight == 0.0:
            continue
        c1_negatives += (weight / n) * (registry.negative_probs[gid]
                                        - registry.negative_members[gid])
    c1[negatives] = c1_negatives
    return CscInstance(features=data.features, c0=np.zeros(n), c1=c1)


def payoff(h: LinearThreshold, dual: DualVector, gamma: float, data: Dataset) -> float:
    """Zero-sum game payoff U(h, lambda) of a single hypothesis."""
    D = MixtureClassifier([h])
    p = expected_predictions(D, data)
    total = error_rate(p, data.y)
    for gid, (lp, lm) in dual.entries.items():
        g = dual.registry.group(gid)
        phi_plus, phi_minus = phi_constraints(D, g, gamma, data, predictions=p)
        total += lp * phi_plus + lm * phi_minus
    return total
