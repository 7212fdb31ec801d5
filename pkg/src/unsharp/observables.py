"""Sharp and unsharp observables over finite outcome spaces.

A :class:`GeneralizedMeasure` (POVM) is a tuple of effects summing to the
identity; a :class:`ProjectiveMeasure` (PVM) additionally has idempotent,
mutually orthogonal elements. Both are validated on construction, and a
failed validation lists every violated invariant, not just the first one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CoexistenceError, DimensionError, ValidationError
from .operator_core import (
    DEFAULT_GROUP_TOL,
    DEFAULT_TOL,
    as_matrix,
    eig_hermitian,
    eigvalsh,
    hermitian_part,
    is_projector,
    op_norm,
    tensor,
)
from .states_effects import DensityOperator, as_state

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


def format_value(x: float) -> str:
    """Outcome label for a measurement value: ``+1``, ``-0.5`` ..."""
    return f"{x:+.12g}"


@dataclass(frozen=True)
class OutcomeSpace:
    labels: tuple[str, ...]
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        labels = tuple(str(lab) for lab in self.labels)
        if len(set(labels)) != len(labels):
            raise ValidationError(f"outcome labels not distinct: {labels}", invariant="distinct labels")
        object.__setattr__(self, "labels", labels)
        if self.values is not None:
            values = tuple(float(v) for v in self.values)
            if len(values) != len(labels):
                raise ValidationError(
                    f"{len(values)} values for {len(labels)} labels", invariant="values length"
                )
            object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.labels)

    @classmethod
    def indexed(cls, n: int) -> "OutcomeSpace":
        return cls(tuple(str(i) for i in range(n)))

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "OutcomeSpace":
        return cls(tuple(format_value(v) for v in values), tuple(values))


def _measure_failures(elements, tol, projective):
    """Collect every invariant violation as ``(index or None, invariant, deviation)``."""
    failures = []
    d = elements[0].shape[0]
    for i, F in enumerate(elements):
        herm = float(np.max(np.abs(F - F.conj().T)))
        if herm > tol:
            failures.append((i, "hermitian", herm))
            continue
        w = eigvalsh(F, np.inf)
        if w[0] < -tol or w[-1] > 1 + tol:
            failures.append((i, "0 <= E <= I", float(max(-w[0], w[-1] - 1))))
        if projective:
            idem = op_norm(F @ F - F)
            if idem > tol:
                failures.append((i, "idempotent", idem))
    if projective:
        for i in range(len(elements)):
            for j in range(i + 1, len(elements)):
                overlap = op_norm(elements[i] @ elements[j])
                if overlap > tol:
                    failures.append(((i, j), "orthogonal", overlap))
    total = op_norm(sum(elements) - np.eye(d))
    if total > tol:
        failures.append((None, "sum = I", total))
    return failures


def _raise_failures(kind, failures, outcomes):
    parts = []
    for idx, inv, dev in failures:
        if idx is None:
            where = "sum"
        elif isinstance(idx, tuple):
            where = f"elements {outcomes.labels[idx[0]]!r},{outcomes.labels[idx[1]]!r}"
        else:
            where = f"element {outcomes.labels[idx]!r}"
        parts.append(f"{where}: {inv} violated by {dev:.3g}")
    completeness = [dev for idx, inv, dev in failures if inv == "sum = I"]
    raise ValidationError(
        f"invalid {kind}: " + "; ".join(parts),
        invariant=failures[0][1],
        deviation=completeness[0] if completeness else failures[0][2],
        failures=failures,
    )


@dataclass(frozen=True, eq=False)
class GeneralizedMeasure:
    """Finite POVM: one effect per outcome, summing to the identity."""

    outcomes: OutcomeSpace
    effects: tuple[np.ndarray, ...]
    tol: float = DEFAULT_TOL

    _projective = False

    def __post_init__(self):
        if len(self.effects) == 0:
            raise ValidationError("measure has no elements", invariant="nonempty")
        mats = [as_matrix(F, f"element {k}") for k, F in enumerate(self.effects)]
        if len({m.shape for m in mats}) != 1:
            raise DimensionError(f"element shapes differ: {sorted({m.shape for m in mats})}")
        if len(mats) != len(self.outcomes):
            raise DimensionError(f"{len(mats)} elements for {len(self.outcomes)} outcomes")
        kind = "PVM" if self._projective else "POVM"
        failures = _measure_failures(mats, self.tol, self._projective)
        if failures:
            _raise_failures(kind, failures, self.outcomes)
        frozen = []
        for m in mats:
            m = hermitian_part(m)
            m.setflags(write=False)
            frozen.append(m)
        object.__setattr__(self, "effects", tuple(frozen))

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    @property
    def labels(self) -> tuple[str, ...]:
        return self.outcomes.labels

    def __len__(self):
        return len(self.effects)

    def element(self, label: str) -> np.ndarray:
        return self.effects[self.outcomes.labels.index(label)]

    def probabilities(self, rho, tol: float | None = None) -> np.ndarray:
        """Born probabilities of every outcome in ``rho`` (unclamped)."""
        rho = as_state(rho, self.tol if tol is None else tol)
        if rho.dim != self.dim:
            raise DimensionError(f"state dim {rho.dim} != measure dim {self.dim}")
        stack = np.stack(self.effects)
        return np.real(np.einsum("ij,kji->k", rho.matrix, stack))


class ProjectiveMeasure(GeneralizedMeasure):
    """Finite PVM: orthogonal projectors summing to the identity."""

    _projective = True

    @property
    def projectors(self) -> tuple[np.ndarray, ...]:
        return self.effects


def _outcomes_for(n, labels, values):
    if labels is None:
        if values is not None:
            return OutcomeSpace.from_values(values)
        return OutcomeSpace.indexed(n)
    return OutcomeSpace(tuple(labels), None if values is None else tuple(values))


def validate_povm(effects, tol: float = DEFAULT_TOL, labels=None, values=None) -> GeneralizedMeasure:
    effects = list(effects)
    return GeneralizedMeasure(_outcomes_for(len(effects), labels, values), tuple(effects), tol)


def validate_pvm(projectors, tol: float = DEFAULT_TOL, labels=None, values=None) -> ProjectiveMeasure:
    projectors = list(projectors)
    return ProjectiveMeasure(_outcomes_for(len(projectors), labels, values), tuple(projectors), tol)


def pvm_from_observable(
    H, group_tol: float = DEFAULT_GROUP_TOL, tol: float = DEFAULT_TOL
) -> ProjectiveMeasure:
    """Spectral measure of ``H``; outcomes are its distinct eigenvalues, ascending."""
    sd = eig_hermitian(H, group_tol, tol)
    return ProjectiveMeasure(OutcomeSpace.from_values(sd.values), tuple(sd.projectors), tol)


def projectors_coexistent(P1, P2, tol: float = DEFAULT_TOL) -> bool:
    """Sharp properties are jointly measurable iff they commute."""
    return commutator_norm(P1, P2, tol) <= tol


def commutator_norm(P1, P2, tol: float = DEFAULT_TOL) -> float:
    A, B = _projector_pair(P1, P2, tol)
    return op_norm(A @ B - B @ A)


def _projector_pair(P1, P2, tol):
    A = as_matrix(P1, "P1")
    B = as_matrix(P2, "P2")
    if A.shape != B.shape:
        raise DimensionError(f"projector shapes differ: {A.shape} vs {B.shape}")
    for name, P in (("P1", A), ("P2", B)):
        if not is_projector(P, tol):
            raise ValidationError(f"{name} is not a projector", invariant="projector")
    return A, B


JOINT_LABELS = ("tt", "tf", "ft", "ff")


def joint_pvm(P1, P2, tol: float = DEFAULT_TOL) -> ProjectiveMeasure:
    """Four-outcome PVM containing both ``{P1, I-P1}`` and ``{P2, I-P2}``.

    Labels read (first property, second property) with ``t``/``f`` for
    true/false.
    """
    A, B = _projector_pair(P1, P2, tol)
    if op_norm(A @ B - B @ A) > tol:
        raise CoexistenceError("projectors do not commute; no joint PVM exists")
    eye = np.eye(A.shape[0])
    Ac, Bc = eye - A, eye - B
    elements = (A @ B, A @ Bc, Ac @ B, Ac @ Bc)
    return ProjectiveMeasure(OutcomeSpace(JOINT_LABELS), elements, tol)


def marginal(joint: GeneralizedMeasure, slot: int) -> tuple[np.ndarray, np.ndarray]:
    """``(true, false)`` marginal of a four-outcome joint over one slot (0 or 1)."""
    tt, tf, ft, ff = joint.effects
    if slot == 0:
        return tt + tf, ft + ff
    return tt + ft, tf + ff


@dataclass(frozen=True, eq=False)
class StochasticKernel:
    """Column-stochastic weights ``w[x, lam]``: one probability vector per input outcome."""

    weights: np.ndarray
    labels: tuple[str, ...] | None = None
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        W = np.array(self.weights, dtype=float)
        if W.ndim != 2 or W.size == 0:
            raise DimensionError(f"kernel must be a nonempty 2-d array, got shape {W.shape}")
        if not np.all(np.isfinite(W)) or np.any(W < 0):
            raise ValidationError("kernel weights must be finite and nonnegative", invariant="w >= 0")
        dev = float(np.max(np.abs(W.sum(axis=0) - 1)))
        if dev > 1e-12:
            raise ValidationError(
                f"kernel columns must sum to 1 (max deviation {dev:.3g})",
                invariant="column sums",
                deviation=dev,
            )
        W.setflags(write=False)
        object.__setattr__(self, "weights", W)

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape

    def compose(self, after: "StochasticKernel") -> "StochasticKernel":
        """Kernel for applying ``self`` and then ``after``."""
        return StochasticKernel(after.weights @ self.weights, after.labels, after.values)

    @classmethod
    def identity(cls, n: int) -> "StochasticKernel":
        return cls(np.eye(n))

    @classmethod
    def flip(cls, eps: float) -> "StochasticKernel":
        return cls(np.array([[1 - eps, eps], [eps, 1 - eps]]))


def smear(measure: GeneralizedMeasure, kernel: StochasticKernel, tol: float | None = None) -> GeneralizedMeasure:
    """Post-process ``measure`` through ``kernel``: ``F_x = sum_lam w[x, lam] E_lam``.

    Output outcomes come from the kernel when it names them, otherwise from
    the input measure when the outcome count is unchanged, otherwise
    indices.
    """
    m, n = kernel.shape
    if n != len(measure):
        raise DimensionError(f"kernel has {n} columns but measure has {len(measure)} outcomes")
    if kernel.labels is not None:
        outcomes = OutcomeSpace(kernel.labels, kernel.values)
    elif m == n:
        outcomes = measure.outcomes
    else:
        outcomes = OutcomeSpace.indexed(m)
    stack = np.stack(measure.effects)
    effects = tuple(np.tensordot(kernel.weights.astype(complex), stack, axes=1))
    return GeneralizedMeasure(outcomes, effects, measure.tol if tol is None else tol)


def spin_component(direction) -> np.ndarray:
    """``n . sigma`` for a unit 3-vector ``n``."""
    n = np.asarray(direction, dtype=float)
    if n.shape != (3,):
        raise DimensionError("direction must be a 3-vector")
    if abs(np.linalg.norm(n) - 1) > 1e-12:
        raise ValidationError(f"direction has norm {np.linalg.norm(n):.15g}, expected 1", invariant="unit vector")
    return n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z


def unsharp_spin(direction, eta: float, tol: float = DEFAULT_TOL) -> GeneralizedMeasure:
    """Qubit spin along ``direction`` with sharpness ``eta``: ``{(I +- eta n.sigma)/2}``."""
    if not 0.0 <= eta <= 1.0:
        raise ValidationError(f"eta = {eta} outside [0, 1]", invariant="0 <= eta <= 1")
    S = spin_component(direction)
    eye = np.eye(2)
    effects = (0.5 * (eye + eta * S), 0.5 * (eye - eta * S))
    return GeneralizedMeasure(OutcomeSpace(("+1", "-1"), (1.0, -1.0)), effects, tol)


def sharp_spin(direction, tol: float = DEFAULT_TOL) -> ProjectiveMeasure:
    S = spin_component(direction)
    eye = np.eye(2)
    return ProjectiveMeasure(OutcomeSpace(("+1", "-1"), (1.0, -1.0)), (0.5 * (eye + S), 0.5 * (eye - S)), tol)


def first_moment(povm: GeneralizedMeasure) -> np.ndarray:
    """``sum_i x_i F_i``, the operator carrying the mean of the outcome values."""
    if povm.outcomes.values is None:
        raise ValidationError("measure has no outcome values", invariant="values present")
    A = sum(x * F for x, F in zip(povm.outcomes.values, povm.effects))
    return hermitian_part(A)


def _observable(A, name, tol):
    A = as_matrix(A, name)
    dev = float(np.max(np.abs(A - A.conj().T)))
    if dev > tol:
        raise ValidationError(f"{name} is not Hermitian (deviation {dev:.3g})", invariant="hermitian", deviation=dev)
    return hermitian_part(A)


def expectation_variance(rho, A, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Mean ``Tr(rho A)`` and standard deviation of ``A`` in ``rho``."""
    rho = as_state(rho, tol)
    A = _observable(A, "A", tol)
    if A.shape[0] != rho.dim:
        raise DimensionError(f"observable dim {A.shape[0]} != state dim {rho.dim}")
    mean = float(np.real(np.trace(rho.matrix @ A)))
    second = float(np.real(np.trace(rho.matrix @ A @ A)))
    return mean, float(np.sqrt(max(0.0, second - mean**2)))


def robertson_check(rho, A, B, tol: float = DEFAULT_TOL, slack: float = 1e-9) -> tuple[float, float, bool]:
    """``(dA*dB, |<[A, B]>|/2, holds)`` in units where hbar = 1."""
    rho = as_state(rho, tol)
    Am = _observable(A, "A", tol)
    Bm = _observable(B, "B", tol)
    _, dA = expectation_variance(rho, Am, tol)
    _, dB = expectation_variance(rho, Bm, tol)
    comm = Am @ Bm - Bm @ Am
    rhs = 0.5 * abs(complex(np.trace(rho.matrix @ comm)))
    lhs = dA * dB
    return lhs, rhs, bool(lhs >= rhs - slack)


def gram_matrix(povm: GeneralizedMeasure) -> np.ndarray:
    """Hilbert-Schmidt Gram matrix ``Tr(F_i F_j)`` (real for Hermitian effects)."""
    V = np.stack([F.reshape(-1) for F in povm.effects])
    return np.real(V.conj() @ V.T)


def is_informationally_complete(povm: GeneralizedMeasure, rel_tol: float = 1e-8) -> bool:
    s = np.linalg.svd(gram_matrix(povm), compute_uv=False)
    rank = int(np.sum(s > rel_tol * s[0])) if s[0] > 0 else 0
    return rank == povm.dim**2


def tetrahedron_povm() -> GeneralizedMeasure:
    """Symmetric informationally complete qubit POVM ``{(I + n_k.sigma)/4}``."""
    dirs = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3)
    eye = np.eye(2)
    return validate_povm([0.25 * (eye + spin_component(n)) for n in dirs])


def chsh_operator(A0, A1, B0, B1) -> np.ndarray:
    return tensor(A0, B0) + tensor(A0, B1) + tensor(A1, B0) - tensor(A1, B1)


def chsh_value(rho, A0, A1, B0, B1, tol: float = DEFAULT_TOL) -> float:
    """``Tr(rho [A0B0 + A0B1 + A1B0 - A1B1])`` for local observables with spectrum in [-1, 1]."""
    rho = as_state(rho, tol)
    local = {}
    for name, X in (("A0", A0), ("A1", A1), ("B0", B0), ("B1", B1)):
        X = _observable(X, name, tol)
        w = np.linalg.eigvalsh(X)
        if w[0] < -1 - tol or w[-1] > 1 + tol:
            raise ValidationError(
                f"{name} spectrum [{w[0]:.6g}, {w[-1]:.6g}] leaves [-1, 1]", invariant="spectrum in [-1, 1]"
            )
        local[name] = X
    da, db = local["A0"].shape[0], local["B0"].shape[0]
    if local["A1"].shape[0] != da or local["B1"].shape[0] != db:
        raise DimensionError("observables on the same side must share a dimension")
    if rho.dim != da * db:
        raise DimensionError(f"state dim {rho.dim} != {da}*{db}")
    C = chsh_operator(local["A0"], local["A1"], local["B0"], local["B1"])
    return float(np.real(np.trace(rho.matrix @ C)))


def singlet_state() -> DensityOperator:
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    return DensityOperator.pure(psi)
