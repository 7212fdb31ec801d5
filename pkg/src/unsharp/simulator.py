"""Ensemble sampling, state update and sequential measurements.

Random numbers come from numpy's counter-based Philox generator keyed by
``SeedSequence(seed, spawn_key=(stream,))``. Trajectory ``k`` of a batch
always uses stream ``k``, so batch results do not depend on how the
trajectories are scheduled across workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConditioningError, ConsistencyError, DimensionError, ValidationError
from .observables import GeneralizedMeasure
from .operator_core import DEFAULT_TOL, hermitian_part, sqrt_psd
from .states_effects import DensityOperator, as_effect, as_state, born_probability

ZERO_PROBABILITY = 1e-12


def stream_rng(seed: int, stream: int = 0) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise ValidationError(f"seed {seed} is not a 64-bit unsigned integer", invariant="seed range")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream,))))


@dataclass(frozen=True, eq=False)
class EnsembleConfig:
    state: DensityOperator
    measure: GeneralizedMeasure
    samples: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "state", as_state(self.state))
        if self.state.dim != self.measure.dim:
            raise DimensionError(f"state dim {self.state.dim} != measure dim {self.measure.dim}")
        if self.samples < 0:
            raise ValidationError("samples must be nonnegative", invariant="samples >= 0")


@dataclass(frozen=True)
class MeasurementRecord:
    labels: tuple[str, ...]
    counts: tuple[int, ...]
    born: tuple[float, ...] | None = None

    @property
    def samples(self) -> int:
        return sum(self.counts)

    @property
    def frequencies(self) -> np.ndarray:
        n = self.samples
        c = np.asarray(self.counts, dtype=float)
        return c / n if n else np.zeros_like(c)

    @property
    def stderr(self) -> np.ndarray:
        n = self.samples
        f = self.frequencies
        return np.sqrt(f * (1 - f) / n) if n else np.zeros_like(f)

    def count(self, label: str) -> int:
        return self.counts[self.labels.index(label)]

    def as_dict(self) -> dict:
        out = {
            "labels": list(self.labels),
            "counts": {lab: c for lab, c in zip(self.labels, self.counts)},
            "frequencies": {lab: float(f) for lab, f in zip(self.labels, self.frequencies)},
            "stderr": {lab: float(s) for lab, s in zip(self.labels, self.stderr)},
            "samples": self.samples,
        }
        if self.born is not None:
            out["born"] = {lab: p for lab, p in zip(self.labels, self.born)}
        return out


def born_vector(rho, measure: GeneralizedMeasure, tol: float = DEFAULT_TOL) -> np.ndarray:
    p = np.array([born_probability(rho, F, tol) for F in measure.effects])
    total = float(p.sum())
    if abs(total - 1) > 1e-9:
        raise ConsistencyError(f"outcome probabilities sum to {total!r}")
    return p


def sample_outcomes(config: EnsembleConfig, stream: int = 0) -> MeasurementRecord:
    """Draw ``config.samples`` outcomes i.i.d. from the Born distribution."""
    p = born_vector(config.state, config.measure, config.measure.tol)
    rng = stream_rng(config.seed, stream)
    counts = rng.multinomial(config.samples, p / p.sum()) if config.samples else np.zeros(len(p), int)
    return MeasurementRecord(config.measure.labels, tuple(int(c) for c in counts), tuple(float(x) for x in p))


def _update(rho_m, root, p):
    post = hermitian_part(root @ rho_m @ root) / p
    return DensityOperator(post / np.trace(post).real)


def luders_update(rho, E, tol: float = DEFAULT_TOL) -> DensityOperator:
    """Conditional state ``sqrt(E) rho sqrt(E) / Tr(rho E)``."""
    rho = as_state(rho, tol)
    E = as_effect(E, tol)
    p = born_probability(rho, E, tol)
    if p <= ZERO_PROBABILITY:
        raise ConditioningError(f"cannot condition on an outcome of probability {p:.3g}")
    return _update(rho.matrix, sqrt_psd(E.matrix, tol), p)


def filter_pass(rho, P, rng: np.random.Generator, tol: float = DEFAULT_TOL):
    """Send one object through the filter for projector ``P``.

    Returns ``(passed, post_state, rng)``; the generator is advanced in place
    and handed back for chaining.
    """
    rho = as_state(rho, tol)
    P = as_effect(P, tol)
    p = born_probability(rho, P, tol)
    passed = bool(rng.random() < p)
    branch = P.matrix if passed else np.eye(rho.dim) - P.matrix
    return passed, luders_update(rho, branch, tol), rng


@dataclass(frozen=True, eq=False)
class Step:
    measure_index: int
    label: str
    probability: float
    post_state: DensityOperator


@dataclass(frozen=True, eq=False)
class Trajectory:
    steps: tuple[Step, ...]
    # set when a sampled outcome had numerically zero probability
    terminated: str | None = None

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.steps)


class _Prepared:
    """Measures with effect square roots computed once."""

    def __init__(self, measures, dim):
        self.measures = list(measures)
        for k, M in enumerate(self.measures):
            if M.dim != dim:
                raise DimensionError(f"measure {k} has dim {M.dim}, state has {dim}")
        self.roots = [[sqrt_psd(F, M.tol) for F in M.effects] for M in self.measures]


def _run_trajectory(rho: DensityOperator, prep: _Prepared, rng) -> Trajectory:
    steps = []
    for k, M in enumerate(prep.measures):
        p = np.clip(M.probabilities(rho), 0.0, 1.0)
        total = p.sum()
        if abs(total - 1) > 1e-9:
            raise ConsistencyError(f"step {k}: probabilities sum to {total!r}")
        i = int(np.searchsorted(np.cumsum(p / total), rng.random(), side="right"))
        i = min(i, len(p) - 1)
        if p[i] <= ZERO_PROBABILITY:
            return Trajectory(tuple(steps), f"zero-probability outcome {M.labels[i]!r} at step {k}")
        rho = _update(rho.matrix, prep.roots[k][i], p[i])
        steps.append(Step(k, M.labels[i], float(p[i]), rho))
    return Trajectory(tuple(steps))


def sequential_measurement(rho, measures, seed: int = 0, stream: int = 0, rng=None) -> Trajectory:
    """One trajectory through ``measures`` in order, Lüders-updating after each.

    ``rng`` overrides the ``(seed, stream)`` generator when given.
    """
    rho = as_state(rho)
    rng = stream_rng(seed, stream) if rng is None else rng
    return _run_trajectory(rho, _Prepared(measures, rho.dim), rng)


def exact_step_distributions(rho, measures, max_branches: int = 100_000) -> list[np.ndarray]:
    """Exact marginal outcome distribution at every step, by enumerating branches."""
    rho = as_state(rho)
    prep = _Prepared(measures, rho.dim)
    branches = [(1.0, rho)]
    out = []
    for k, M in enumerate(prep.measures):
        marg = np.zeros(len(M))
        nxt = []
        for w, state in branches:
            p = np.clip(M.probabilities(state), 0.0, 1.0)
            marg += w * p
            for i, pi in enumerate(p):
                if pi > ZERO_PROBABILITY:
                    nxt.append((w * pi, _update(state.matrix, prep.roots[k][i], pi)))
        if len(nxt) > max_branches:
            raise ValidationError(f"more than {max_branches} branches", invariant="branch budget")
        out.append(marg)
        branches = nxt
    return out


@dataclass(frozen=True, eq=False)
class SequenceStatistics:
    trajectories: tuple[Trajectory, ...]
    records: tuple[MeasurementRecord, ...]
    terminated: int = field(default=0)


def run_sequences(
    rho, measures, trajectories: int, seed: int = 0, workers: int | None = None, exact: bool = True
) -> SequenceStatistics:
    """Sample ``trajectories`` independent runs and tally outcomes per step.

    Trajectory ``k`` draws from stream ``k``; ``workers`` > 1 spreads them
    over a thread pool without changing the result.
    """
    rho = as_state(rho)
    prep = _Prepared(measures, rho.dim)

    def one(k):
        return _run_trajectory(rho, prep, stream_rng(seed, k))

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            runs = tuple(pool.map(one, range(trajectories)))
    else:
        runs = tuple(one(k) for k in range(trajectories))
    born = exact_step_distributions(rho, prep.measures) if exact else None
    records = []
    for k, M in enumerate(prep.measures):
        counts = dict.fromkeys(M.labels, 0)
        for t in runs:
            if len(t.steps) > k:
                counts[t.steps[k].label] += 1
        records.append(
            MeasurementRecord(
                M.labels,
                tuple(counts[lab] for lab in M.labels),
                None if born is None else tuple(float(x) for x in born[k]),
            )
        )
    return SequenceStatistics(runs, tuple(records), sum(t.terminated is not None for t in runs))
