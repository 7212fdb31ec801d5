"""States, effects, Born probabilities and the property taxonomy."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ValidationError
from .operator_core import (
    DEFAULT_TOL,
    as_matrix,
    eigvalsh,
    hermitian_part,
    op_norm,
)


def _frozen(A: np.ndarray) -> np.ndarray:
    A = np.array(A, dtype=complex)
    A.setflags(write=False)
    return A


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive, unit-trace operator. Validated on construction."""

    matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        A = as_matrix(self.matrix, "state")
        w = eigvalsh(A, self.tol)
        if w[0] < -self.tol:
            raise ValidationError(
                f"state is not positive (min eigenvalue {w[0]:.3g})",
                invariant="psd",
                deviation=float(-w[0]),
            )
        tr = complex(np.trace(A))
        if abs(tr - 1) > self.tol:
            raise ValidationError(
                f"state trace is {tr.real:.12g}, expected 1",
                invariant="unit trace",
                deviation=abs(tr - 1),
            )
        object.__setattr__(self, "matrix", _frozen(hermitian_part(A)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, psi, tol: float = DEFAULT_TOL) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), tol)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim) / dim)


@dataclass(frozen=True, eq=False)
class Effect:
    """Hermitian operator with spectrum in ``[0, 1]`` (up to ``tol``)."""

    matrix: np.ndarray
    tol: float = DEFAULT_TOL
    # source effect when this one was built by complement(); keeps the
    # involution bit-exact
    _complement_of: "Effect | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        A = as_matrix(self.matrix, "effect")
        w = eigvalsh(A, self.tol)
        if w[0] < -self.tol or w[-1] > 1 + self.tol:
            dev = float(max(-w[0], w[-1] - 1))
            raise ValidationError(
                f"effect spectrum [{w[0]:.12g}, {w[-1]:.12g}] leaves [0, 1]",
                invariant="0 <= E <= I",
                deviation=dev,
            )
        object.__setattr__(self, "matrix", _frozen(hermitian_part(A)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


class EffectClass(enum.Enum):
    TRIVIAL_O = "Trivial-O"
    TRIVIAL_I = "Trivial-I"
    SEMITRANSPARENT = "Semitransparent"
    SHARP_PROJECTION = "SharpProjection"
    REGULAR = "Regular"
    BELOW_SEMITRANSPARENT = "BelowSemitransparent"
    ABOVE_SEMITRANSPARENT = "AboveSemitransparent"

    def __str__(self):
        return self.value


def as_state(rho, tol: float = DEFAULT_TOL) -> DensityOperator:
    return rho if isinstance(rho, DensityOperator) else DensityOperator(rho, tol)


def as_effect(E, tol: float = DEFAULT_TOL) -> Effect:
    return E if isinstance(E, Effect) else Effect(E, tol)


def born_probability(rho, E, tol: float = DEFAULT_TOL) -> float:
    """``Re Tr(rho E)``, snapped into ``[0, 1]`` when within ``tol`` of it."""
    rho = as_state(rho, tol)
    E = as_effect(E, tol)
    if rho.dim != E.dim:
        raise DimensionError(f"state dim {rho.dim} != effect dim {E.dim}")
    # Tr(AB) as an elementwise sum avoids forming the product
    w = float(np.real(np.sum(rho.matrix * E.matrix.T)))
    if -tol <= w < 0.0:
        w = 0.0
    elif 1.0 < w <= 1.0 + tol:
        w = 1.0
    if not 0.0 <= w <= 1.0:
        raise ValidationError(f"probability {w!r} outside [0, 1]", invariant="0 <= w <= 1")
    return w


def complement(E, tol: float = DEFAULT_TOL) -> Effect:
    """The counterproperty ``I - E``."""
    E = as_effect(E, tol)
    if E._complement_of is not None:
        return E._complement_of
    return Effect(np.eye(E.dim) - E.matrix, E.tol, _complement_of=E)


def is_effect(H, tol: float = DEFAULT_TOL) -> bool:
    w = eigvalsh(H, tol)
    return bool(w[0] >= -tol and w[-1] <= 1 + tol)


def is_sharp(E, tol: float = DEFAULT_TOL) -> bool:
    A = as_effect(E, tol).matrix
    return op_norm(A @ A - A) <= tol


def _shifted_spectrum(E, tol):
    E = as_effect(E, tol)
    return np.linalg.eigvalsh(E.matrix) - 0.5


def is_regular(E, tol: float = DEFAULT_TOL) -> bool:
    """Neither ``E <= I/2`` nor ``E >= I/2``: the spectrum straddles one half."""
    s = _shifted_spectrum(E, tol)
    return bool(s[-1] > tol and s[0] < -tol)


def is_real_in_state(E, rho, tol: float = DEFAULT_TOL) -> bool:
    """Property is certainly true or certainly false in ``rho``."""
    w = born_probability(rho, E, tol)
    return w <= tol or w >= 1 - tol


def classify(E, tol: float = DEFAULT_TOL) -> EffectClass:
    E = as_effect(E, tol)
    eye = np.eye(E.dim)
    if op_norm(E.matrix) <= tol:
        return EffectClass.TRIVIAL_O
    if op_norm(E.matrix - eye) <= tol:
        return EffectClass.TRIVIAL_I
    if op_norm(E.matrix - 0.5 * eye) <= tol:
        return EffectClass.SEMITRANSPARENT
    if is_sharp(E, tol):
        return EffectClass.SHARP_PROJECTION
    if is_regular(E, tol):
        return EffectClass.REGULAR
    s = _shifted_spectrum(E, tol)
    if s[-1] <= tol:
        return EffectClass.BELOW_SEMITRANSPARENT
    return EffectClass.ABOVE_SEMITRANSPARENT
