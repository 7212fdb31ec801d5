"""Dense complex-matrix primitives.

Everything here works on plain ``numpy`` arrays of shape ``(d, d)``. Inputs
are validated (square, finite, dimension within :data:`MAX_DIM`) and never
mutated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DimensionError, ValidationError

MAX_DIM = 64
DEFAULT_TOL = 1e-9
DEFAULT_GROUP_TOL = 1e-8


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Return ``M`` as a complex square array, checking shape and finiteness."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    if A.shape[0] == 0:
        raise DimensionError(f"{name} is empty")
    if A.shape[0] > MAX_DIM:
        raise CapacityError(f"{name} has dimension {A.shape[0]} > {MAX_DIM}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} has non-finite entries", invariant="finite")
    return A


def dagger(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def op_norm(A) -> float:
    """Operator (spectral) norm."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def hermitian_part(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + dagger(A))


def is_hermitian(M, tol: float = DEFAULT_TOL) -> bool:
    A = as_matrix(M)
    return bool(np.max(np.abs(A - dagger(A))) <= tol)


def _require_hermitian(M, tol: float, name: str = "matrix") -> np.ndarray:
    A = as_matrix(M, name)
    dev = float(np.max(np.abs(A - dagger(A))))
    if dev > tol:
        raise ValidationError(
            f"{name} is not Hermitian (max |M - M^dagger| = {dev:.3g})",
            invariant="hermitian",
            deviation=dev,
        )
    return A


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigen-data of a Hermitian matrix.

    ``eigenvalues`` are ascending and ``eigenvectors`` holds matching
    orthonormal columns. ``groups`` lists ``(value, projector)`` pairs after
    merging near-degenerate eigenvalues; only these basis-independent
    projectors should be relied on downstream.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    groups: tuple[tuple[float, np.ndarray], ...]

    @property
    def values(self) -> list[float]:
        return [v for v, _ in self.groups]

    @property
    def projectors(self) -> list[np.ndarray]:
        return [P for _, P in self.groups]

    def reconstruct(self) -> np.ndarray:
        return sum(v * P for v, P in self.groups)


def eig_hermitian(
    H, group_tol: float = DEFAULT_GROUP_TOL, tol: float = DEFAULT_TOL
) -> SpectralDecomposition:
    """Spectral decomposition with degeneracy grouping.

    Consecutive eigenvalues whose gap is at most ``group_tol * max(1, |lambda|)``
    fall into the same eigenspace; the group's value is the mean of its members.
    """
    A = hermitian_part(_require_hermitian(H, tol))
    w, V = np.linalg.eigh(A)
    groups = []
    start = 0
    for k in range(1, len(w) + 1):
        if k < len(w) and w[k] - w[k - 1] <= group_tol * max(1.0, abs(w[k - 1])):
            continue
        cols = V[:, start:k]
        groups.append((float(np.mean(w[start:k])), cols @ dagger(cols)))
        start = k
    return SpectralDecomposition(w, V, tuple(groups))


def eigvalsh(H, tol: float = DEFAULT_TOL) -> np.ndarray:
    return np.linalg.eigvalsh(hermitian_part(_require_hermitian(H, tol)))


def is_positive_semidefinite(H, tol: float = DEFAULT_TOL) -> bool:
    return bool(eigvalsh(H, tol)[0] >= -tol)


def is_projector(P, tol: float = DEFAULT_TOL) -> bool:
    A = as_matrix(P)
    return bool(np.max(np.abs(A - dagger(A))) <= tol and op_norm(A @ A - A) <= tol)


def tensor(A, B) -> np.ndarray:
    """Kronecker product ``A (x) B`` with the first factor as the major index."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.ndim != 2 or B.ndim != 2:
        raise DimensionError("tensor expects two matrices")
    rows, cols = A.shape[0] * B.shape[0], A.shape[1] * B.shape[1]
    if max(rows, cols) > MAX_DIM:
        raise CapacityError(f"tensor product dimension {max(rows, cols)} > {MAX_DIM}")
    return np.kron(A, B)


def sqrt_psd(H, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Positive square root of a PSD matrix.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero; anything more negative
    is rejected.
    """
    A = hermitian_part(_require_hermitian(H, tol))
    w, V = np.linalg.eigh(A)
    if w[0] < -tol:
        raise ValidationError(
            f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3g})",
            invariant="psd",
            deviation=float(-w[0]),
        )
    R = (V * np.sqrt(np.clip(w, 0.0, None))) @ dagger(V)
    return hermitian_part(R)


def range_basis(A, rank_tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the range of ``A``."""
    U, s, _ = np.linalg.svd(A)
    return U[:, : int(np.sum(s > rank_tol))]


def null_space_basis(A, rank_tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of ``A``."""
    _, s, Vh = np.linalg.svd(A)
    rank = int(np.sum(s > rank_tol))
    return dagger(Vh[rank:])


def meet_projectors(P1, P2, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Projector onto ``range(P1) & range(P2)``.

    The intersection is the joint null space of ``I - P1`` and ``I - P2``,
    read off an SVD of the two stacked. Singular values up to ``sqrt(tol)``
    count as zero, since a projector perturbed by ``tol`` moves its
    singular values by about that much and the margin keeps rank decisions
    stable.
    """
    A = as_matrix(P1, "P1")
    B = as_matrix(P2, "P2")
    if A.shape != B.shape:
        raise DimensionError(f"projector shapes differ: {A.shape} vs {B.shape}")
    for name, P in (("P1", A), ("P2", B)):
        if not is_projector(P, tol):
            raise ValidationError(f"{name} is not a projector", invariant="projector")
    eye = np.eye(A.shape[0])
    N = null_space_basis(np.vstack([eye - A, eye - B]), np.sqrt(tol))
    return N @ dagger(N)
