"""Plain-text serialization of trained mixtures and group registries.

Format, one record per line (numbers carry 9 significant digits):

    h <intercept> <w1> ... <wd>           mixture hypothesis (uniform weight)
    g <id> linear <intercept> <w1> ...    registry group over protected attrs
    g <id> marginal <col> <kind> <value> <name>

Lines starting with '#' are comments.
"""

from __future__ import annotations

import numpy as np

from .auditor import MarginalGroup
from .fairness_metrics import GroupRegistry, MixtureClassifier
from .regression_oracle import LinearThreshold

FMT = "%.9g"


def save_model(path, mixture: MixtureClassifier, registry: GroupRegistry | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# subfair model\n")
        fh.write(f"# hypotheses={len(mixture.hypotheses)}\n")
        for h in mixture.hypotheses:
            ws = " ".join(FMT % w for w in h.weights)
            fh.write(f"h {FMT % h.intercept} {ws}".rstrip() + "\n")
        if registry is not None and len(registry) > 0:
            fh.write(f"# registry groups={len(registry)}\n")
            for gid, group in enumerate(registry.groups):
                if isinstance(group, MarginalGroup):
                    fh.write(f"g {gid} marginal {group.col} {group.kind} "
                             f"{FMT % group.value} {group.name}\n")
                else:
                    ws = " ".join(FMT % w for w in group.weights)
                    fh.write(f"g {gid} linear {FMT % group.intercept} {ws}".rstrip() + "\n")


def load_model(path) -> MixtureClassifier:
    """Read back the mixture hypotheses of a saved model."""
    hypotheses = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] != "h":
                continue
            values = [float(v) for v in parts[1:]]
            hypotheses.append(LinearThreshold(np.array(values[1:]), values[0]))
    if not hypotheses:
        raise ValueError(f"{path}: no hypothesis lines found")
    return MixtureClassifier(hypotheses)
