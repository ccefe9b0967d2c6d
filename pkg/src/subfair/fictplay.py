"""Fictitious-play training of fair mixtures.

Each round both players best respond to the opponent's empirical history:
the learner solves a cost-sensitive problem against the time-averaged dual
vector, and the auditor finds the most-violating subgroup of the uniform
mixture over all past hypotheses, playing dual mass C on its violated side
(or the zero vector when no violation exceeds the fairness slack gamma).

Runs for different input gammas follow identical trajectories until the
audited violation first dips to a run's gamma, so a sweep can simulate a
shared trunk and fork lazily; `run_shared` implements exactly that and
single runs are the one-gamma special case.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .auditor import AuditResult, audit_heuristic
from .dataset import Dataset
from .fairness_metrics import (DualVector, GroupRegistry, MixtureClassifier,
                               error_rate, learner_costs)
from .regression_oracle import LinearThreshold, RegressionSolver

TRACE_EVERY_DENSE_LIMIT = 10_000  # above this many rounds, trace every 10th


@dataclass
class FictPlayConfig:
    """Run parameters: fairness slack gamma, dual bound C, round count."""

    gamma: float
    C: float = 10.0
    iters: int = 1000
    trace_every: int = 0  # 0 = every round up to 10k rounds, else every 10th

    def __post_init__(self):
        if not (0.0 <= self.gamma <= 1.0):
            raise ValueError("gamma must lie in [0, 1]")
        if self.C <= 0:
            raise ValueError("dual bound C must be positive")
        if self.iters < 1:
            raise ValueError("need at least one round")
        if self.trace_every < 0:
            raise ValueError("trace cadence must be nonnegative")

    @property
    def cadence(self) -> int:
        if self.trace_every > 0:
            return self.trace_every
        return 1 if self.iters <= TRACE_EVERY_DENSE_LIMIT else 10


@dataclass
class TraceRecord:
    """One traced round: mixture error and found violation at iteration t.

    t indexes the traced mixture (t=0 is the unconstrained initial
    classifier alone).  eps_last is the error of the newest hypothesis in
    that mixture; rich_gamma is filled by the marginal baseline only.
    """

    t: int
    eps_mix: float
    gamma_mix: float
    group_id: int
    auditor_zero: bool
    eps_last: float
    rich_gamma: float | None = None

    CSV_HEADER = "t,eps_mix,gamma_mix,group_id,auditor_zero,eps_last"

    def csv_row(self, fmt="%.9g", with_rich=False) -> str:
        cells = [str(self.t), fmt % self.eps_mix, fmt % self.gamma_mix,
                 str(self.group_id), str(int(self.auditor_zero)), fmt % self.eps_last]
        if with_rich:
            cells.append(fmt % (self.rich_gamma if self.rich_gamma is not None else float("nan")))
        return ",".join(cells)


@dataclass
class FictPlayState:
    """Mutable play history: folded hypotheses, dual sums, group registry.

    `pending` holds the hypothesis produced by the current round's learner
    step; it joins the mixture (and pred_sum) only when the round completes,
    because the auditor responds to the mixture excluding it.
    """

    config: FictPlayConfig
    hypotheses: list[LinearThreshold]
    pred_sum: np.ndarray  # integer vote counts over folded hypotheses
    dual_sum: dict[int, list[float]]
    registry: GroupRegistry
    last_error: float
    solver: RegressionSolver
    pending: LinearThreshold | None = None

    @property
    def t(self) -> int:
        return len(self.hypotheses)

    def average_dual(self) -> DualVector:
        t = self.t
        entries = {gid: (sp / t, sm / t) for gid, (sp, sm) in self.dual_sum.items()}
        return DualVector(registry=self.registry, bound=self.config.C, entries=entries)

    def mixture(self) -> MixtureClassifier:
        return MixtureClassifier(list(self.hypotheses))

    def mixture_predictions(self) -> np.ndarray:
        return self.pred_sum / self.t

    def clone(self) -> "FictPlayState":
        return FictPlayState(
            config=self.config,
            hypotheses=list(self.hypotheses),
            pred_sum=self.pred_sum.copy(),
            dual_sum={gid: list(v) for gid, v in self.dual_sum.items()},
            registry=self.registry.clone(),
            last_error=self.last_error,
            solver=self.solver,
            pending=self.pending,
        )


@dataclass
class AuditorPlay:
    """Outcome of one auditor step."""

    result: AuditResult
    group_id: int
    zero: bool


@dataclass
class RunOutput:
    """Everything a finished run produces."""

    mixture: MixtureClassifier
    records: list[TraceRecord]
    registry: GroupRegistry
    input_gamma: float
    algorithm: str = "subgroup"

    @property
    def final_record(self) -> TraceRecord:
        return self.records[-1]


def default_auditor(data: Dataset):
    """Heuristic subgroup auditor with a cached protected-feature solver."""
    solver = RegressionSolver(data.x)

    def audit(D, predictions):
        return audit_heuristic(D, data, predictions=predictions, solver=solver)

    return audit


def init(data: Dataset, config: FictPlayConfig) -> FictPlayState:
    """Start a run: the unconstrained error minimizer and a zero dual vector."""
    solver = RegressionSolver(data.features)
    registry = GroupRegistry()
    zero_dual = DualVector(registry=registry, bound=config.C, entries={})
    costs = learner_costs(zero_dual, data)
    h0 = solver.solve_csc(costs.c0, costs.c1)
    votes = h0.predict(data.features)
    return FictPlayState(
        config=config,
        hypotheses=[h0],
        pred_sum=votes.astype(np.int64),
        dual_sum={},
        registry=registry,
        last_error=error_rate(votes.astype(float), data.y),
        solver=solver,
    )


def learner_step(state: FictPlayState, data: Dataset) -> LinearThreshold:
    """Best response to the average dual: solve the weighted CSC problem.

    The new hypothesis is held as pending until the round completes.
    """
    costs = learner_costs(state.average_dual(), data)
    h = state.solver.solve_csc(costs.c0, costs.c1)
    state.pending = h
    return h


def auditor_step(state: FictPlayState, data: Dataset,
                 config: FictPlayConfig | None = None,
                 audit_fn=None,
                 predictions: np.ndarray | None = None) -> AuditorPlay:
    """Best response to the current mixture (the pending hypothesis excluded).

    Plays dual mass C on the found group's violated side, or the zero vector
    when the found violation is within gamma.  The found group is registered
    either way so traces always resolve.
    """
    config = config or state.config
    if audit_fn is None:
        audit_fn = default_auditor(data)
    if predictions is None:
        predictions = state.mixture_predictions()
    result = audit_fn(state.mixture(), predictions)
    gid = state.registry.register(result.group, data)
    zero = result.value <= config.gamma
    if not zero:
        sums = state.dual_sum.setdefault(gid, [0.0, 0.0])
        # Group FP above base violates phi_minus, below base violates phi_plus.
        sums[1 if result.disparity > 0 else 0] += config.C
    return AuditorPlay(result=result, group_id=gid, zero=zero)


def _advance(state: FictPlayState, data: Dataset):
    """Fold the pending hypothesis into the mixture."""
    h = state.pending
    votes = h.predict(data.features)
    state.hypotheses.append(h)
    state.pred_sum = state.pred_sum + votes
    state.last_error = error_rate(votes.astype(float), data.y)
    state.pending = None


def run_shared(data: Dataset, config: FictPlayConfig, gammas,
               audit_fn=None, rich_audit_fn=None,
               algorithm: str = "subgroup") -> dict[float, RunOutput]:
    """Run the dynamics for several input gammas with a shared trunk.

    All gammas follow one trajectory until a round's audited violation falls
    at or below some of them; the zero-play side then forks with a cloned
    state.  Output per gamma is identical to an independent run.
    """
    gammas = sorted(set(float(g) for g in gammas))
    if not gammas:
        raise ValueError("need at least one gamma")
    for g in gammas:
        if not (0.0 <= g <= 1.0):
            raise ValueError("every gamma must lie in [0, 1]")
    if audit_fn is None:
        audit_fn = default_auditor(data)

    base_state = init(data, replace(config, gamma=gammas[0]))
    total_rounds = config.iters
    cadence = config.cadence
    out: dict[float, RunOutput] = {}

    def simulate(state: FictPlayState, records: list[TraceRecord],
                 branch_gammas: list[float], t_start: int):
        for t in range(t_start, total_rounds + 1):
            learner_step(state, data)
            p_bar = state.mixture_predictions()
            mixture = state.mixture()
            result = audit_fn(mixture, p_bar)
            gid = state.registry.register(result.group, data)
            value = result.value

            zero_side = [g for g in branch_gammas if value <= g]
            play_side = [g for g in branch_gammas if value > g]

            due = ((t - 1) % cadence == 0) or (t == total_rounds)
            rich_value = None
            if due and rich_audit_fn is not None:
                rich_value = rich_audit_fn(mixture, p_bar).value

            def complete(st, recs, zero: bool):
                if not zero:
                    sums = st.dual_sum.setdefault(gid, [0.0, 0.0])
                    sums[1 if result.disparity > 0 else 0] += config.C
                if due:
                    recs.append(TraceRecord(
                        t=t - 1,
                        eps_mix=error_rate(p_bar, data.y),
                        gamma_mix=value,
                        group_id=gid,
                        auditor_zero=zero,
                        eps_last=st.last_error,
                        rich_gamma=rich_value,
                    ))
                _advance(st, data)

            if zero_side and play_side:
                fork = state.clone()
                fork_records = list(records)
                complete(fork, fork_records, zero=True)
                simulate(fork, fork_records, zero_side, t + 1)
                branch_gammas = play_side
                complete(state, records, zero=False)
            else:
                complete(state, records, zero=bool(zero_side))

        mixture = MixtureClassifier(state.hypotheses[:total_rounds])
        for g in branch_gammas:
            out[g] = RunOutput(
                mixture=mixture,
                records=records,
                registry=state.registry,
                input_gamma=g,
                algorithm=algorithm,
            )

    simulate(base_state, [], gammas, 1)
    return out


def run_full(data: Dataset, config: FictPlayConfig,
             audit_fn=None, rich_audit_fn=None,
             algorithm: str = "subgroup") -> RunOutput:
    """One training run, returning the mixture, trace, and group registry."""
    results = run_shared(data, config, [config.gamma],
                         audit_fn=audit_fn, rich_audit_fn=rich_audit_fn,
                         algorithm=algorithm)
    return results[config.gamma]


def run(data: Dataset, config: FictPlayConfig,
        audit_fn=None) -> tuple[MixtureClassifier, list[TraceRecord]]:
    """Run the dynamics, returning the final mixture and its trace."""
    output = run_full(data, config, audit_fn=audit_fn)
    return output.mixture, output.records
