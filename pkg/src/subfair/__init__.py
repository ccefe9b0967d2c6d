"""Rich subgroup fairness: training, auditing, and tradeoff analysis.

Trains linear threshold classifiers whose false-positive rate is equalized
across every subgroup definable by a linear threshold over the protected
attributes, via fictitious play between a cost-sensitive learner and a
subgroup auditor.  Also audits arbitrary linear mixtures (heuristically,
over marginal groups, or exhaustively over a 2-D threshold grid) and
extracts error/unfairness Pareto frontiers from gamma sweeps.
"""

from .auditor import (AuditResult, MarginalGroup, MarginalGroupFamily,
                      SurfaceGrid, audit_exhaustive, audit_grid,
                      audit_heuristic, audit_marginal, build_marginal_family)
from .dataset import (ColumnScale, Dataset, PreprocessConfig, balance_labels,
                      load_csv, make_gerrymander_fixture, parity_classifier)
from .fairness_metrics import (DualVector, FairnessReport, GroupRegistry,
                               MixtureClassifier, error_rate,
                               expected_predictions, fp_rate,
                               gamma_unfairness, learner_costs, payoff,
                               phi_constraints)
from .fictplay import (FictPlayConfig, FictPlayState, RunOutput, TraceRecord,
                       auditor_step, init, learner_step, run, run_full,
                       run_shared)
from .frontier import (ParetoPoint, SweepResult, SweepSpec, pareto_frontier,
                       sweep)
from .marginal_baseline import run_marginal, run_marginal_full
from .modelio import load_model, save_model
from .regression_oracle import (CscInstance, LinearThreshold, csc_brute_force,
                                csc_solve, enumerate_thresholds,
                                fit_least_squares)

__version__ = "0.1.0"
