"""Cost-sensitive classification via paired least-squares regressions.

The heuristic fits one linear regression to the cost of predicting 0 and one
to the cost of predicting 1, then classifies each point by the cheaper
predicted cost.  A small brute-force solver over enumerated hyperplanes is
provided as a testing oracle for small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

# Ridge jitter added to the normal equations so degenerate designs stay solvable.
RIDGE_JITTER = 1e-8

# Hyperplanes through point subsets are shifted by this amount along their
# (unit) normal so both the open and closed side of each boundary is realized.
BOUNDARY_SHIFT = 1e-9

BRUTE_FORCE_MAX_N = 16
BRUTE_FORCE_MAX_D = 3


@dataclass
class LinearThreshold:
    """Halfspace classifier: predict 1 iff weights @ x + intercept > 0.

    Ties (decision value exactly 0) predict 0, so predictions are
    deterministic and reproducible.
    """

    weights: np.ndarray
    intercept: float

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.intercept = float(self.intercept)
        if not np.all(np.isfinite(self.weights)) or not np.isfinite(self.intercept):
            raise ValueError("linear threshold parameters must be finite")

    def decision_values(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.weights + self.intercept

    def predict(self, X: np.ndarray) -> np.ndarray:
        """0/1 predictions for each row of X."""
        return (self.decision_values(X) > 0.0).astype(np.int64)

    def key(self) -> tuple:
        """Hashable identity used for exact-equality deduplication."""
        return (tuple(self.weights.tolist()), self.intercept)


@dataclass
class CscInstance:
    """A cost-sensitive classification instance.

    c0[i] / c1[i] are the costs of predicting 0 / 1 on row i of features.
    """

    features: np.ndarray
    c0: np.ndarray
    c1: np.ndarray

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.c0 = np.asarray(self.c0, dtype=float)
        self.c1 = np.asarray(self.c1, dtype=float)
        n = self.features.shape[0]
        if self.c0.shape != (n,) or self.c1.shape != (n,):
            raise ValueError("cost vectors must match the number of feature rows")
        if not (np.all(np.isfinite(self.features))
                and np.all(np.isfinite(self.c0))
                and np.all(np.isfinite(self.c1))):
            raise ValueError("CSC instance entries must be finite")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def cost_of(self, h: LinearThreshold) -> float:
        """Total cost sum(h*c1 + (1-h)*c0) of a hypothesis on this instance."""
        pred = h.predict(self.features)
        return float(np.sum(np.where(pred == 1, self.c1, self.c0)))


class RegressionSolver:
    """Least-squares solver with a cached Cholesky factor of the normal matrix.

    Fictitious play refits regressions on the same design every round; caching
    the factorization makes each fit O(n*d + d^2) instead of O(n*d^2 + d^3).
    The solve path is identical to `fit_least_squares`, so results are
    bit-for-bit the same.
    """

    def __init__(self, features: np.ndarray):
        features = np.asarray(features, dtype=float)
        n = features.shape[0]
        self._design = np.hstack([features, np.ones((n, 1))])
        gram = self._design.T @ self._design
        gram += RIDGE_JITTER * np.eye(gram.shape[0])
        self._factor = cho_factor(gram, lower=True)

    def fit(self, targets: np.ndarray) -> tuple[np.ndarray, float]:
        targets = np.asarray(targets, dtype=float)
        beta = cho_solve(self._factor, self._design.T @ targets)
        return beta[:-1], float(beta[-1])

    def solve_csc(self, c0: np.ndarray, c1: np.ndarray) -> LinearThreshold:
        """Fit r0 to c0 and r1 to c1; return the cheaper-cost classifier.

        The returned hypothesis predicts 1 iff r1(x) < r0(x), i.e. iff
        (w0 - w1) @ x + (b0 - b1) > 0.
        """
        w0, b0 = self.fit(c0)
        w1, b1 = self.fit(c1)
        return LinearThreshold(w0 - w1, b0 - b1)


def fit_least_squares(features: np.ndarray, targets: np.ndarray) -> tuple[np.ndarray, float]:
    """Affine least-squares fit, returning (weights, intercept).

    Minimizes sum of squared residuals plus RIDGE_JITTER * ||beta||^2 via the
    normal equations, so singular designs are handled deterministically.
    """
    return RegressionSolver(features).fit(targets)


def csc_solve(inst: CscInstance) -> LinearThreshold:
    """Heuristic CSC solver: regress both cost vectors, threshold the difference."""
    return RegressionSolver(inst.features).solve_csc(inst.c0, inst.c1)


def _unit(v: np.ndarray) -> np.ndarray | None:
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or not np.isfinite(norm):
        return None
    return v / norm


def enumerate_thresholds(points: np.ndarray) -> list[LinearThreshold]:
    """Candidate halfspaces realizing the linear-threshold dichotomies of points.

    Candidates: the constant-0 and constant-1 classifiers, hyperplanes through
    each d-subset of points, hyperplanes through each point with normals along
    every coordinate axis and every pairwise difference direction, each taken
    in both orientations and nudged by BOUNDARY_SHIFT to either side.  For
    points in general position this realizes every achievable dichotomy; the
    extra normals keep degenerate (e.g. collinear) configurations covered.
    """
    points = np.asarray(points, dtype=float)
    n, d = points.shape
    hyperplanes: list[tuple[np.ndarray, float]] = []

    def add(normal, through_point):
        w = _unit(np.asarray(normal, dtype=float))
        if w is None:
            return
        hyperplanes.append((w, -float(w @ through_point)))

    if d == 1:
        for i in range(n):
            add(np.ones(1), points[i])
    elif d == 2:
        for i, j in combinations(range(n), 2):
            v = points[j] - points[i]
            add(np.array([-v[1], v[0]]), points[i])
    elif d == 3:
        for i, j, k in combinations(range(n), 3):
            v1 = points[j] - points[i]
            v2 = points[k] - points[i]
            add(np.cross(v1, v2), points[i])
    else:
        raise ValueError("threshold enumeration supports d <= 3")

    # Difference directions and coordinate axes through every point: covers
    # prefix cuts of collinear configurations that d-subsets alone miss.
    for i in range(n):
        for axis in range(d):
            e = np.zeros(d)
            e[axis] = 1.0
            add(e, points[i])
        for j in range(n):
            if i != j:
                add(points[j] - points[i], points[i])

    candidates = [
        LinearThreshold(np.zeros(d), -1.0),  # constant 0
        LinearThreshold(np.zeros(d), 1.0),   # constant 1
    ]
    for w, b in hyperplanes:
        for orient in (1.0, -1.0):
            for shift in (BOUNDARY_SHIFT, -BOUNDARY_SHIFT):
                candidates.append(LinearThreshold(orient * w, orient * b + shift))
    return candidates


def csc_brute_force(inst: CscInstance) -> LinearThreshold:
    """Minimum-cost linear threshold by candidate enumeration (test oracle).

    Guarded to n <= 16, d <= 3.  Ties are broken toward fewer positive
    predictions, then toward the earlier candidate.
    """
    if inst.n > BRUTE_FORCE_MAX_N or inst.d > BRUTE_FORCE_MAX_D:
        raise ValueError(
            f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, d <= {BRUTE_FORCE_MAX_D}; "
            f"got n={inst.n}, d={inst.d}"
        )
    best = None
    best_rank = None
    for idx, cand in enumerate(enumerate_thresholds(inst.features)):
        pred = cand.predict(inst.features)
        cost = float(np.sum(np.where(pred == 1, inst.c1, inst.c0)))
        rank = (cost, int(pred.sum()), idx)
        if best_rank is None or rank < best_rank:
            best, best_rank = cand, rank
    return best
