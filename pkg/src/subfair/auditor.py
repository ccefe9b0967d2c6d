"""Subgroup auditors: find the group most violating FP-rate fairness.

Three search families over protected attributes:

* heuristic: two cost-sensitive reductions (one per disparity direction)
  solved with the least-squares CSC heuristic over linear thresholds;
* marginal: exact search over the finite single-attribute group family;
* grid: exhaustive 20x20 sweep of intercept-free linear thresholds over two
  protected attributes (the discrimination surface).

An exhaustive linear-threshold auditor for tiny protected spaces backs the
heuristic both as a test oracle and as extra candidates when enumeration is
cheap (the least-squares regressions are blind to cost patterns orthogonal
to affine functions of the protected attributes, e.g. a pure parity pattern
on a 2x2 attribute grid).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .fairness_metrics import (FairnessReport, MixtureClassifier,
                               expected_predictions, fp_rate, gamma_unfairness)
from .regression_oracle import (BRUTE_FORCE_MAX_D, BRUTE_FORCE_MAX_N,
                                CscInstance, LinearThreshold, RegressionSolver,
                                csc_brute_force, enumerate_thresholds)

GRID_SIZE = 20  # 20 x 20 = 400 subgroups, thetas in {-1.0, -0.9, ..., 0.9}


@dataclass
class AuditResult:
    """A subgroup fairness certificate.

    direction is +1 when the group's FP rate sits above the base rate and -1
    when below; value is the group's gamma-unfairness (alpha * beta).
    """

    group: object  # LinearThreshold or MarginalGroup
    direction: int
    value: float
    alpha: float
    beta: float
    fp_base: float
    fp_group: float
    disparity: float

    @classmethod
    def from_report(cls, group, rep: FairnessReport) -> "AuditResult":
        return cls(
            group=group,
            direction=1 if rep.disparity >= 0 else -1,
            value=rep.value,
            alpha=rep.alpha,
            beta=rep.beta,
            fp_base=rep.fp_base,
            fp_group=rep.fp_group,
            disparity=rep.disparity,
        )

    def group_label(self) -> str:
        if isinstance(self.group, LinearThreshold):
            ws = " ".join("%.9g" % w for w in self.group.weights)
            return f"threshold[{ws} | {'%.9g' % self.group.intercept}]"
        return str(self.group)

    def describe(self) -> str:
        return (f"{self.group_label()} direction={self.direction:+d} "
                f"gamma_unfairness={self.value:.9g} alpha={self.alpha:.9g} "
                f"fp_group={self.fp_group:.9g} fp_base={self.fp_base:.9g}")


@dataclass(frozen=True)
class MarginalGroup:
    """A single-attribute group: equality for binary columns, mean split otherwise."""

    col: int
    name: str
    kind: str  # "eq", "ge", "lt"
    value: float

    def indicator(self, data: Dataset) -> np.ndarray:
        column = data.x[:, self.col]
        if self.kind == "eq":
            mask = column == self.value
        elif self.kind == "ge":
            mask = column >= self.value
        elif self.kind == "lt":
            mask = column < self.value
        else:
            raise ValueError(f"unknown marginal group kind {self.kind!r}")
        return mask.astype(np.int64)

    def key(self) -> tuple:
        return ("marginal", self.col, self.kind, self.value)

    def __str__(self):
        op = {"eq": "=", "ge": ">=", "lt": "<"}[self.kind]
        return f"{self.name}{op}{self.value:.9g}"


@dataclass
class MarginalGroupFamily:
    """All marginal groups of a dataset with materialized membership masks."""

    groups: list[MarginalGroup]
    masks: list[np.ndarray]

    def __len__(self):
        return len(self.groups)


def build_marginal_family(data: Dataset) -> MarginalGroupFamily:
    """Enumerate marginal groups: two per protected column.

    Columns with exactly two observed values get one equality group per
    value; any other column (including constant ones) is split at its mean,
    with the >= side closed.
    """
    if data.d_protected < 1:
        raise ValueError("marginal family needs at least one protected column")
    groups: list[MarginalGroup] = []
    for col, name in enumerate(data.protected_names):
        column = data.x[:, col]
        values = np.unique(column)
        if len(values) == 2:
            for v in values:
                groups.append(MarginalGroup(col, name, "eq", float(v)))
        else:
            mean = float(column.mean())
            groups.append(MarginalGroup(col, name, "ge", mean))
            groups.append(MarginalGroup(col, name, "lt", mean))
    masks = [g.indicator(data) for g in groups]
    return MarginalGroupFamily(groups, masks)


def _best_by_value(D, data, groups, predictions) -> AuditResult:
    best = None
    for group in groups:
        rep = gamma_unfairness(D, group, data, predictions=predictions)
        if best is None or rep.value > best.value:
            best = AuditResult.from_report(group, rep)
    return best


def audit_heuristic(D: MixtureClassifier, data: Dataset,
                    predictions: np.ndarray | None = None,
                    solver: RegressionSolver | None = None) -> AuditResult:
    """Most-unfair linear-threshold subgroup, via two CSC reductions.

    One instance per disparity direction: on negative rows the cost of
    membership is -/+ (p_i - FP(D)) / n, so a group's total cost equals
    -/+ alpha * (FP(D, g) - FP(D)).  Both candidates are scored by their true
    gamma-unfairness and the larger wins, so the returned value is always a
    sound lower bound.  On tiny protected spaces the brute-force candidates
    are scored too, which makes the audit exact there.
    """
    p = expected_predictions(D, data) if predictions is None else predictions
    if not np.any(data.y == 0):
        raise ValueError("auditing requires at least one negative row")
    n = data.n
    fp_base = fp_rate(p, data.y)
    negatives = data.y == 0
    if solver is None:
        solver = RegressionSolver(data.x)

    candidates: list[LinearThreshold] = []
    zeros = np.zeros(n)
    for sign in (1.0, -1.0):
        c1 = np.where(negatives, -sign * (p - fp_base) / n, 0.0)
        candidates.append(solver.solve_csc(zeros, c1))
        if n <= BRUTE_FORCE_MAX_N and data.d_protected <= BRUTE_FORCE_MAX_D:
            inst = CscInstance(features=data.x, c0=zeros, c1=c1)
            candidates.append(csc_brute_force(inst))

    return _best_by_value(D, data, candidates, p)


def audit_marginal(D: MixtureClassifier, data: Dataset,
                   family: MarginalGroupFamily | None = None,
                   predictions: np.ndarray | None = None) -> AuditResult:
    """Exact argmax of gamma-unfairness over the marginal group family."""
    p = expected_predictions(D, data) if predictions is None else predictions
    if family is None:
        family = build_marginal_family(data)
    return _best_by_value(D, data, family.groups, p)


def audit_exhaustive(D: MixtureClassifier, data: Dataset,
                     predictions: np.ndarray | None = None,
                     max_distinct: int = BRUTE_FORCE_MAX_N) -> AuditResult:
    """Exact max over all linear-threshold subgroups of a tiny protected space.

    Enumerates candidate halfspaces over the distinct protected rows; guarded
    to at most `max_distinct` distinct rows and 3 protected attributes.
    """
    points = np.unique(data.x, axis=0)
    if len(points) > max_distinct or data.d_protected > BRUTE_FORCE_MAX_D:
        raise ValueError(
            f"exhaustive audit limited to {max_distinct} distinct protected rows "
            f"and d <= {BRUTE_FORCE_MAX_D}")
    p = expected_predictions(D, data) if predictions is None else predictions
    return _best_by_value(D, data, enumerate_thresholds(points), p)


@dataclass
class SurfaceGrid:
    """Discrimination surface over two protected attributes.

    signed[i, j] is alpha * (FP(D, g) - FP(D)) and value[i, j] the
    gamma-unfairness of the intercept-free group
    g(x) = 1{theta1 * x_a + theta2 * x_b >= 0} at theta = (theta1[i], theta2[j]).
    """

    attr_names: tuple[str, str]
    theta1: np.ndarray
    theta2: np.ndarray
    signed: np.ndarray
    value: np.ndarray

    def max_cell(self) -> tuple[float, float, float]:
        i, j = np.unravel_index(np.argmax(self.value), self.value.shape)
        return float(self.theta1[i]), float(self.theta2[j]), float(self.value[i, j])

    def fraction_above(self, threshold: float) -> float:
        return float(np.mean(self.value > threshold))

    def csv_rows(self, fmt="%.9g"):
        yield "theta1,theta2,signed_disparity,gamma_unfairness"
        for i, t1 in enumerate(self.theta1):
            for j, t2 in enumerate(self.theta2):
                yield ",".join(fmt % v for v in
                               (t1, t2, self.signed[i, j], self.value[i, j]))


def audit_grid(D: MixtureClassifier, data: Dataset, attrs: tuple[int, int],
               predictions: np.ndarray | None = None) -> SurfaceGrid:
    """Evaluate the 20x20 discrimination surface on two protected columns."""
    a, b = attrs
    if not (0 <= a < data.d_protected and 0 <= b < data.d_protected):
        raise ValueError(f"protected column indices {attrs} out of range")
    for col in (a, b):
        if np.any(np.abs(data.x[:, col]) > 1.0 + 1e-12):
            raise ValueError(f"protected column {col} is not scaled into [-1, 1]")

    p = expected_predictions(D, data) if predictions is None else predictions
    fp_base = fp_rate(p, data.y)
    xa, xb = data.x[:, a], data.x[:, b]
    negatives = data.y == 0

    thetas = (np.arange(GRID_SIZE) - GRID_SIZE // 2) / (GRID_SIZE // 2)
    signed = np.zeros((GRID_SIZE, GRID_SIZE))
    value = np.zeros((GRID_SIZE, GRID_SIZE))
    for i, t1 in enumerate(thetas):
        for j, t2 in enumerate(thetas):
            mask = (t1 * xa + t2 * xb >= 0.0).astype(np.int64)
            alpha = float(np.mean((mask == 1) & negatives))
            fp_group = fp_rate(p, data.y, mask)
            signed[i, j] = alpha * (fp_group - fp_base)
            value[i, j] = alpha * abs(fp_base - fp_group)
    return SurfaceGrid(
        attr_names=(data.protected_names[a], data.protected_names[b]),
        theta1=thetas.copy(),
        theta2=thetas.copy(),
        signed=signed,
        value=value,
    )
