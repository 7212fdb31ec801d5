"""Seeded random operators for tests and experiments.

All functions take a ``numpy.random.Generator``.
"""

from __future__ import annotations

import numpy as np

from .observables import GeneralizedMeasure, OutcomeSpace, StochasticKernel
from .operator_core import dagger, hermitian_part, sqrt_psd
from .states_effects import DensityOperator, Effect


def ginibre(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_hermitian(rng, d, scale=1.0):
    return hermitian_part(ginibre(rng, d)) * scale


def random_unitary(rng, d):
    """Haar-distributed unitary via QR with phase correction."""
    Q, R = np.linalg.qr(ginibre(rng, d))
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_psd(rng, d, rank=None):
    X = ginibre(rng, d, d if rank is None else rank)
    return X @ dagger(X)


def random_state(rng, d, rank=None) -> DensityOperator:
    W = random_psd(rng, d, rank)
    return DensityOperator(W / np.trace(W).real)


def random_effect(rng, d) -> Effect:
    """Random effect with eigenvalues uniform in [0, 1] and a Haar eigenbasis."""
    U = random_unitary(rng, d)
    w = rng.uniform(0, 1, size=d)
    return Effect(hermitian_part((U * w) @ dagger(U)))


def random_projector(rng, d, rank=None):
    rank = int(rng.integers(0, d + 1)) if rank is None else rank
    U = random_unitary(rng, d)[:, :rank]
    return U @ dagger(U)


def random_povm(rng, d, n) -> GeneralizedMeasure:
    """``F_i = S^{-1/2} G_i S^{-1/2}`` with ``G_i`` random PSD and ``S = sum G_i``."""
    while True:
        G = [random_psd(rng, d) for _ in range(n)]
        S = sum(G)
        if np.linalg.eigvalsh(S)[0] > 1e-10:
            break
    R = np.linalg.inv(sqrt_psd(S))
    effects = [hermitian_part(R @ g @ R) for g in G]
    return GeneralizedMeasure(OutcomeSpace.indexed(n), tuple(effects))


def random_kernel(rng, m, n) -> StochasticKernel:
    W = rng.uniform(0, 1, size=(m, n))
    W /= W.sum(axis=0)
    # force exact column sums by absorbing rounding into the last row
    W[-1] = 1 - W[:-1].sum(axis=0)
    return StochasticKernel(np.clip(W, 0, None))
