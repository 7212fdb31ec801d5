"""Projective dilations of POVMs.

For an ``n``-outcome POVM on ``C^d`` the extended space is ``C^d (x) C^n``
with system-major ordering: basis vector ``|a>|i>`` sits at index
``a * n + i``. The isometry is

    V psi = sum_i (sqrt(F_i) psi) (x) e_i

and the extended projectors ``P_i = I_d (x) |e_i><e_i|`` compress back to the
POVM: ``V^dagger P_i V = F_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DimensionError
from .observables import GeneralizedMeasure, OutcomeSpace, ProjectiveMeasure
from .operator_core import MAX_DIM, dagger, hermitian_part, op_norm, sqrt_psd, tensor
from .randmat import random_unitary
from .states_effects import DensityOperator, as_state


@dataclass(frozen=True, eq=False)
class DilationResult:
    ancilla_dim: int
    isometry: np.ndarray  # shape (d * ancilla_dim, d)
    extended_pvm: ProjectiveMeasure

    @property
    def system_dim(self) -> int:
        return self.isometry.shape[1]

    def embed(self, rho) -> np.ndarray:
        """``V rho V^dagger`` on the extended space."""
        m = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)
        return self.isometry @ m @ dagger(self.isometry)

    def probabilities(self, rho) -> np.ndarray:
        R = self.embed(rho)
        return np.array([np.real(np.sum(R * P.T)) for P in self.extended_pvm.projectors])

    def isometry_defect(self) -> float:
        V = self.isometry
        return op_norm(dagger(V) @ V - np.eye(V.shape[1]))

    def compressed(self) -> list[np.ndarray]:
        V = self.isometry
        return [dagger(V) @ P @ V for P in self.extended_pvm.projectors]


def _check_capacity(d, n):
    if d * n > MAX_DIM:
        raise CapacityError(f"extended dimension {d}*{n} = {d * n} exceeds {MAX_DIM}")


def _ancilla_projectors(d, n, groups):
    eye = np.eye(d)
    out = []
    for group in groups:
        Q = np.zeros((n, n))
        for i in group:
            Q[i, i] = 1.0
        out.append(tensor(eye, Q))
    return out


def _isometry(povm, n):
    d = povm.dim
    V = np.zeros((d * n, d), dtype=complex)
    for i, F in enumerate(povm.effects):
        # rows a*n + i hold sqrt(F_i)[a, :]
        V[i::n, :] = sqrt_psd(F)
    return V


def dilate(povm: GeneralizedMeasure) -> DilationResult:
    """Dilation with one ancilla level per outcome."""
    d, n = povm.dim, len(povm)
    _check_capacity(d, n)
    V = _isometry(povm, n)
    projectors = _ancilla_projectors(d, n, [[i] for i in range(n)])
    pvm = ProjectiveMeasure(povm.outcomes, tuple(projectors), povm.tol)
    return DilationResult(n, V, pvm)


def alternate_dilation(povm: GeneralizedMeasure, variant_seed: int = 0) -> DilationResult:
    """A second, different dilation with the same statistics.

    With two or more outcomes, the ancilla is rotated by a seeded Haar
    unitary ``U``: ``V' = (I (x) U) V`` and ``P_i' = (I (x) U) P_i (I (x) U)^dagger``.
    A single-outcome POVM leaves nothing to rotate, so instead the ancilla
    gains an extra level carrying an always-zero outcome, absorbed into the
    lone projector, which then becomes the identity on ``C^d (x) C^2``.
    """
    d, n = povm.dim, len(povm)
    base = dilate(povm)
    if n == 1:
        _check_capacity(d, 2)
        V = np.zeros((2 * d, d), dtype=complex)
        V[0::2, :] = base.isometry
        projectors = _ancilla_projectors(d, 2, [[0, 1]])
        return DilationResult(2, V, ProjectiveMeasure(povm.outcomes, tuple(projectors), povm.tol))

    rng = np.random.default_rng([variant_seed, 0x4E41494D])
    while True:
        W = tensor(np.eye(d), random_unitary(rng, n))
        projectors = [hermitian_part(W @ P @ dagger(W)) for P in base.extended_pvm.projectors]
        if projector_family_distance(projectors, base.extended_pvm.projectors) > 1e-6:
            break
    pvm = ProjectiveMeasure(povm.outcomes, tuple(projectors), povm.tol)
    return DilationResult(n, W @ base.isometry, pvm)


def projector_family_distance(family_a, family_b) -> float:
    """Max operator-norm distance between corresponding projectors.

    Families acting on spaces of different dimension or with different
    outcome counts are infinitely far apart.
    """
    a = list(getattr(family_a, "projectors", family_a))
    b = list(getattr(family_b, "projectors", family_b))
    if len(a) != len(b) or a[0].shape != b[0].shape:
        return float("inf")
    return max(op_norm(P - Q) for P, Q in zip(a, b))


def verify_dilation(povm: GeneralizedMeasure, dilation: DilationResult, states) -> float:
    """Largest ``|Tr(V rho V^dagger P_i) - Tr(rho F_i)|`` over ``states`` and outcomes."""
    if dilation.system_dim != povm.dim:
        raise DimensionError(f"dilation acts on dim {dilation.system_dim}, POVM on {povm.dim}")
    if len(dilation.extended_pvm) != len(povm):
        raise DimensionError("dilation and POVM have different outcome counts")
    worst = 0.0
    for rho in states:
        rho = as_state(rho, povm.tol)
        diff = dilation.probabilities(rho) - povm.probabilities(rho)
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def spanning_states(d: int) -> list[DensityOperator]:
    """``d**2`` pure states whose projectors span all Hermitian ``d x d`` matrices."""
    eye = np.eye(d)
    out = [DensityOperator.pure(eye[j]) for j in range(d)]
    for j in range(d):
        for k in range(j + 1, d):
            out.append(DensityOperator.pure(eye[j] + eye[k]))
            out.append(DensityOperator.pure(eye[j] + 1j * eye[k]))
    return out


def trine_povm() -> GeneralizedMeasure:
    """Qubit trine: ``(2/3)|psi_k><psi_k|`` at real-plane angles 0, 120, 240 degrees."""
    effects = []
    for k in range(3):
        t = 2 * np.pi * k / 3
        psi = np.array([np.cos(t), np.sin(t)])
        effects.append(2 / 3 * np.outer(psi, psi))
    return GeneralizedMeasure(OutcomeSpace(("0", "120", "240")), tuple(effects))
