import numpy as np
import pytest

from subfair.dataset import Dataset, make_gerrymander_fixture, parity_classifier
from subfair.fairness_metrics import MixtureClassifier
from subfair.regression_oracle import LinearThreshold


def planted_dataset(n=200, seed=11, delta=1.0) -> Dataset:
    """Synthetic data with a planted FP disparity on the z1=+1 subgroup.

    Negatives in that group get their score feature shifted upward, so the
    unconstrained learned classifier false-positives them more often.  With
    the defaults the unconstrained subgroup unfairness lands near 0.05.
    """
    rng = np.random.default_rng(seed)
    z1 = rng.choice([-1.0, 1.0], size=n)
    z2 = rng.choice([-1.0, 1.0], size=n)
    y = rng.integers(0, 2, size=n)
    score = 1.4 * y + rng.normal(size=n) + delta * (1 - y) * (z1 == 1.0)
    noise = rng.normal(size=n)
    return Dataset(
        x=np.column_stack([z1, z2]),
        xp=np.column_stack([score, noise]),
        y=y,
        protected_names=["z1", "z2"],
        unprotected_names=["score", "noise"],
    )


def random_small_dataset(rng, n=10, d_protected=2, d_unprotected=1) -> Dataset:
    """Random dataset with protected attributes in [-1, 1] and both labels."""
    while True:
        y = rng.integers(0, 2, size=n)
        if 0 < y.sum() < n:
            break
    return Dataset(
        x=rng.uniform(-1.0, 1.0, size=(n, d_protected)),
        xp=rng.normal(size=(n, d_unprotected)),
        y=y,
        protected_names=[f"p{i}" for i in range(d_protected)],
        unprotected_names=[f"u{i}" for i in range(d_unprotected)],
    )


def random_mixture(rng, d, k=3) -> MixtureClassifier:
    return MixtureClassifier([
        LinearThreshold(rng.normal(size=d), rng.normal()) for _ in range(k)
    ])


@pytest.fixture
def gerrymander():
    return make_gerrymander_fixture()


@pytest.fixture
def parity_mixture():
    return MixtureClassifier([parity_classifier()])
