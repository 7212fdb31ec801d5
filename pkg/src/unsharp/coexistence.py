"""Joint-measurability search for pairs of binary POVMs.

Two binary observables ``{A+, A-}`` and ``{B+, B-}`` are coexistent iff some
Hermitian ``G`` satisfies

    G >= 0,   A+ - G >= 0,   B+ - G >= 0,   I - A+ - B+ + G >= 0,

in which case ``{G, A+ - G, B+ - G, I - A+ - B+ + G}`` is a joint POVM with
the right marginals. We maximise the *margin*, the smallest eigenvalue over
the four constraint operators. The margin is concave in ``G``, so local
refinement converges to the global optimum, but a negative result is still
only a report of what the search found within its budget, never a proof of
infeasibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionError, ValidationError
from .observables import PAULIS, GeneralizedMeasure, OutcomeSpace
from .operator_core import DEFAULT_TOL, hermitian_part, op_norm

JOINT_OUTCOMES = OutcomeSpace(("++", "+-", "-+", "--"))


@dataclass(frozen=True)
class SearchBudget:
    grid_points: int = 9  # per axis, odd so the box centre is sampled
    depth: int = 6
    refine: int = 4
    starts: int = 20
    seed: int = 0
    feas_tol: float = 1e-8


@dataclass(frozen=True, eq=False)
class CoexistenceResult:
    found: bool
    residual: float  # best margin reached; >= -feas_tol when found
    G: np.ndarray
    joint: GeneralizedMeasure | None
    method: str
    evaluations: int

    def constraint_eigenvalues(self, A_plus, B_plus) -> list[np.ndarray]:
        return [np.linalg.eigvalsh(C) for C in constraint_operators(self.G, A_plus, B_plus)]


def constraint_operators(G, A_plus, B_plus):
    eye = np.eye(G.shape[0])
    return (G, A_plus - G, B_plus - G, eye - A_plus - B_plus + G)


def margin(G, A_plus, B_plus) -> float:
    return min(float(np.linalg.eigvalsh(hermitian_part(C))[0]) for C in constraint_operators(G, A_plus, B_plus))


def _binary_plus(M: GeneralizedMeasure, name: str) -> np.ndarray:
    if not isinstance(M, GeneralizedMeasure):
        raise ValidationError(f"{name} is not a measure", invariant="measure")
    if len(M) != 2:
        raise ValidationError(f"{name} has {len(M)} outcomes; binary required", invariant="binary")
    return M.effects[0]


# Qubit parametrisation: G = a I + b . sigma has eigenvalues a +- |b|.

def _bloch(H):
    return np.real(np.trace(H)) / 2, np.array([np.real(np.trace(H @ S)) / 2 for S in PAULIS])


def _from_bloch(a, b):
    return a * np.eye(2) + sum(bk * S for bk, S in zip(b, PAULIS))


def _qubit_margins(a, b, alpha0, alpha, beta0, beta):
    """Vectorised margin for arrays ``a`` of shape (N,) and ``b`` of shape (N, 3)."""
    nb = np.linalg.norm(b, axis=1)
    m1 = a - nb
    m2 = (alpha0 - a) - np.linalg.norm(alpha - b, axis=1)
    m3 = (beta0 - a) - np.linalg.norm(beta - b, axis=1)
    m4 = (1 - alpha0 - beta0 + a) - np.linalg.norm(b - alpha - beta, axis=1)
    return np.minimum(np.minimum(m1, m2), np.minimum(m3, m4))


def qubit_grid_search(A_plus, B_plus, budget: SearchBudget = SearchBudget()):
    """Coarse-to-fine grid over ``(a, b_x, b_y, b_z)``.

    Starts on the box ``a in [0, 1]``, ``|b_k| <= 1/2`` which contains every
    feasible ``G`` (``0 <= G <= I`` forces ``|b| <= min(a, 1 - a)``), then
    repeatedly recentres on the best point and shrinks the box by
    ``budget.refine``. Returns ``(best_params, best_margin, evaluations)``.
    """
    alpha0, alpha = _bloch(A_plus)
    beta0, beta = _bloch(B_plus)
    centre = np.array([0.5, 0.0, 0.0, 0.0])
    half = np.full(4, 0.5)
    k = budget.grid_points
    offsets = np.linspace(-1.0, 1.0, k)
    mesh = np.stack(np.meshgrid(offsets, offsets, offsets, offsets, indexing="ij"), axis=-1).reshape(-1, 4)
    best, best_m, evals = centre, -np.inf, 0
    for _ in range(budget.depth):
        pts = centre + mesh * half
        m = _qubit_margins(pts[:, 0], pts[:, 1:], alpha0, alpha, beta0, beta)
        evals += len(pts)
        i = int(np.argmax(m))
        if m[i] > best_m:
            best, best_m = pts[i], float(m[i])
        centre = best
        half = half / budget.refine
    return best, best_m, evals


def _hermitian_basis(d):
    """Orthonormal (Hilbert-Schmidt) real basis of d x d Hermitian matrices."""
    basis = []
    for j in range(d):
        E = np.zeros((d, d), dtype=complex)
        E[j, j] = 1
        basis.append(E)
    for j in range(d):
        for k in range(j + 1, d):
            E = np.zeros((d, d), dtype=complex)
            E[j, k] = E[k, j] = 1 / np.sqrt(2)
            basis.append(E)
            E = np.zeros((d, d), dtype=complex)
            E[j, k] = -1j / np.sqrt(2)
            E[k, j] = 1j / np.sqrt(2)
            basis.append(E)
    return np.stack(basis)


def polish(G0, A_plus, B_plus, maxiter: int = 500):
    """Local refinement of the margin from ``G0``.

    Maximises ``t`` subject to every eigenvalue of every constraint operator
    being at least ``t`` (SLSQP). The epigraph form is smooth away from
    eigenvalue crossings, which lets the solver follow the ridges where
    several constraints are active at once. Never returns a worse point
    than ``G0``. Returns ``(G, margin, evaluations)``.
    """
    d = G0.shape[0]
    basis = _hermitian_basis(d)

    def to_G(x):
        return np.tensordot(x, basis, axes=1)

    def constraints(z):
        G = to_G(z[:-1])
        return np.concatenate([np.linalg.eigvalsh(C) for C in constraint_operators(G, A_plus, B_plus)]) - z[-1]

    grad = np.zeros(d * d + 1)
    grad[-1] = -1.0
    m0 = margin(G0, A_plus, B_plus)
    z0 = np.append(np.real(np.einsum("kij,ji->k", basis, G0)), m0)
    res = minimize(
        lambda z: -z[-1],
        z0,
        jac=lambda z: grad,
        method="SLSQP",
        constraints=[{"type": "ineq", "fun": constraints}],
        options={"ftol": 1e-15, "maxiter": maxiter},
    )
    G = hermitian_part(to_G(res.x[:-1]))
    m = margin(G, A_plus, B_plus)
    if m < m0:
        return G0, m0, res.nfev
    return G, m, res.nfev


def _multistart_search(A_plus, B_plus, budget: SearchBudget, x_init):
    """Polish from the given starts plus seeded random ones; stop early once feasible."""
    d = A_plus.shape[0]
    rng = np.random.default_rng(budget.seed)
    starts = list(x_init)
    scale = 0.5 * min(np.linalg.eigvalsh(A_plus)[-1], np.linalg.eigvalsh(B_plus)[-1])
    while len(starts) < budget.starts:
        X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        W = X @ X.conj().T
        starts.append(W / op_norm(W) * scale)
    best_G, best_m, evals = None, -np.inf, 0
    for G0 in starts[: budget.starts]:
        G, m, n = polish(hermitian_part(G0), A_plus, B_plus)
        evals += n
        if m > best_m:
            best_G, best_m = G, m
        if best_m > 0:
            break
    return best_G, best_m, evals


def coexist_binary_povms(
    A: GeneralizedMeasure,
    B: GeneralizedMeasure,
    budget: SearchBudget = SearchBudget(),
    tol: float = DEFAULT_TOL,
) -> CoexistenceResult:
    """Look for a four-outcome joint observable with marginals ``A`` and ``B``.

    Cheap closed-form candidates are tried first: ``G = A+`` for identical
    observables and ``G = A+ B+`` for commuting ones. Otherwise qubits use the
    deterministic coarse-to-fine grid followed by :func:`polish`, and larger
    dimensions polish from several seeded random starts.

    Returns
    -------
    CoexistenceResult
        ``found`` is True when the best margin is at least ``-budget.feas_tol``;
        ``joint`` then holds the POVM with outcomes ``++, +-, -+, --``.
    """
    Ap = _binary_plus(A, "A")
    Bp = _binary_plus(B, "B")
    if Ap.shape != Bp.shape:
        raise DimensionError(f"dimension mismatch: {Ap.shape[0]} vs {Bp.shape[0]}")
    d = Ap.shape[0]

    candidates = []
    if op_norm(Ap - Bp) <= tol:
        candidates.append(("identical", Ap))
    if op_norm(Ap @ Bp - Bp @ Ap) <= tol:
        candidates.append(("commuting product", hermitian_part(Ap @ Bp)))
    evals = 0
    for method, G in candidates:
        m = margin(G, Ap, Bp)
        evals += 1
        if m >= -budget.feas_tol:
            return _result(True, m, G, Ap, Bp, method, evals, budget, tol)

    if d == 2:
        params, _, n = qubit_grid_search(Ap, Bp, budget)
        evals += n
        G, m, n = polish(_from_bloch(params[0], params[1:]), Ap, Bp)
        evals += n
        method = "qubit grid"
    else:
        starts = [G for _, G in candidates] or [hermitian_part(Ap @ Bp)]
        G, m, n = _multistart_search(Ap, Bp, budget, starts)
        evals += n
        method = "multi-start"
    return _result(m >= -budget.feas_tol, m, G, Ap, Bp, method, evals, budget, tol)


def _result(found, m, G, Ap, Bp, method, evals, budget, tol):
    G = hermitian_part(G)
    joint = None
    if found:
        eye = np.eye(G.shape[0])
        effects = (G, Ap - G, Bp - G, eye - Ap - Bp + G)
        joint = GeneralizedMeasure(JOINT_OUTCOMES, effects, max(tol, budget.feas_tol))
    return CoexistenceResult(bool(found), float(m), G, joint, method, evals)
