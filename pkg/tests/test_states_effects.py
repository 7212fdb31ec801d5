import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unsharp.errors import DimensionError, ValidationError
from unsharp.operator_core import meet_projectors, op_norm
from unsharp.randmat import random_effect, random_hermitian, random_projector, random_state, random_unitary
from unsharp.states_effects import (
    DensityOperator,
    Effect,
    EffectClass,
    born_probability,
    classify,
    complement,
    is_effect,
    is_real_in_state,
    is_regular,
    is_sharp,
)

HALF = 0.5 * np.eye(2)
P_PLUS = 0.5 * np.array([[1, 1], [1, 1]])
RHO0 = np.diag([1.0, 0.0])


@st.composite
def effects(draw, max_dim=6):
    d = draw(st.integers(2, max_dim))
    w = draw(st.lists(st.floats(0, 1), min_size=d, max_size=d))
    U = random_unitary(np.random.default_rng(draw(st.integers(0, 2**32 - 1))), d)
    return Effect((U * np.array(w)) @ U.conj().T)


class TestConstruction:
    def test_state_trace(self):
        with pytest.raises(ValidationError, match="trace"):
            DensityOperator(np.diag([0.5, 0.4]))

    def test_state_positive(self):
        with pytest.raises(ValidationError, match="positive"):
            DensityOperator(np.diag([1.5, -0.5]))

    def test_effect_bounds(self):
        with pytest.raises(ValidationError) as exc:
            Effect(np.diag([1.2, 0.5]))
        assert exc.value.invariant == "0 <= E <= I"
        assert exc.value.deviation == pytest.approx(0.2)

    def test_immutable(self):
        E = Effect(HALF)
        with pytest.raises(ValueError):
            E.matrix[0, 0] = 1


class TestBorn:
    def test_identity_effect(self, rng):
        for _ in range(20):
            assert born_probability(random_state(rng, 3), np.eye(3)) == pytest.approx(1.0, abs=1e-12)

    def test_semitransparent(self, rng):
        for _ in range(20):
            assert born_probability(random_state(rng, 2), HALF) == pytest.approx(0.5, abs=1e-12)

    def test_diagonal(self):
        assert born_probability(RHO0, np.diag([0.8, 0.3])) == pytest.approx(0.8, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            born_probability(RHO0, np.eye(3))

    def test_invalid_effect(self):
        with pytest.raises(ValidationError):
            born_probability(RHO0, np.diag([1.2, 0.0]))

    def test_clamped_to_unit_interval(self):
        # rounding can push Tr(rho I) a hair past 1
        rho = DensityOperator(np.diag([1 / 3, 1 / 3, 1 / 3]))
        w = born_probability(rho, np.eye(3))
        assert 0.0 <= w <= 1.0

    def test_random_in_unit_interval(self, rng):
        for _ in range(2000):
            d = int(rng.integers(2, 9))
            w = born_probability(random_state(rng, d), random_effect(rng, d))
            assert 0.0 <= w <= 1.0

    def test_outside_unit_interval_witness(self, rng):
        """An operator with an eigenvalue outside [0,1] has an eigenstate giving that value."""
        found = 0
        while found < 200:
            d = int(rng.integers(2, 9))
            H = random_hermitian(rng, d)
            w, V = np.linalg.eigh(H)
            bad = [k for k in range(d) if not 0 <= w[k] <= 1]
            if not bad:
                continue
            k = bad[0]
            rho = np.outer(V[:, k], V[:, k].conj())
            assert np.real(np.trace(rho @ H)) == pytest.approx(w[k], abs=1e-9)
            assert not is_effect(H)
            found += 1


class TestComplement:
    def test_zero(self):
        np.testing.assert_array_equal(complement(np.zeros((2, 2))).matrix, np.eye(2))

    def test_semitransparent(self):
        np.testing.assert_array_equal(complement(HALF).matrix, HALF)

    def test_diagonal(self):
        np.testing.assert_allclose(complement(np.diag([0.8, 0.3])).matrix, np.diag([0.2, 0.7]), atol=1e-15)

    @given(effects())
    @settings(max_examples=200, deadline=None)
    def test_involution_exact(self, E):
        np.testing.assert_array_equal(complement(complement(E)).matrix, E.matrix)

    @given(effects(), st.integers(0, 2**32 - 1))
    @settings(max_examples=200, deadline=None)
    def test_probabilities_add_to_one(self, E, seed):
        rho = random_state(np.random.default_rng(seed), E.dim)
        assert born_probability(rho, E) + born_probability(rho, complement(E)) == pytest.approx(1, abs=1e-9)

    @given(effects())
    @settings(max_examples=500, deadline=None)
    def test_regularity_preserved(self, E):
        if is_regular(E):
            assert is_regular(complement(E))


class TestPredicates:
    def test_is_effect(self, rng):
        assert is_effect(random_projector(rng, 4))
        assert not is_effect(np.diag([1.2, 0.5]))
        assert is_effect(P_PLUS)

    def test_is_sharp(self):
        assert is_sharp(np.diag([1.0, 0.0]))
        assert not is_sharp(np.diag([0.8, 0.3]))
        assert not is_sharp(HALF)

    def test_sharp_meet_with_complement(self, rng):
        for _ in range(50):
            P = random_projector(rng, 4)
            assert is_sharp(P)
            assert op_norm(meet_projectors(P, complement(P).matrix)) <= 1e-9

    def test_is_regular(self):
        assert is_regular(np.diag([1.0, 0.0]))
        assert not is_regular(0.4 * np.eye(2))
        assert is_regular(np.diag([0.7, 0.2]))
        # eigenvalue exactly one half counts toward neither side
        assert not is_regular(np.diag([0.5, 0.2]))

    def test_nontrivial_projectors_regular(self, rng):
        for _ in range(100):
            d = int(rng.integers(2, 7))
            P = random_projector(rng, d, int(rng.integers(1, d)))
            assert is_sharp(P) and is_regular(P)

    def test_real_in_state(self):
        assert is_real_in_state(np.diag([1.0, 0.0]), RHO0)
        assert not is_real_in_state(HALF, RHO0)
        # Tr(I/2 * P_plus) = 1/2 by hand
        assert not is_real_in_state(P_PLUS, HALF)
        assert is_real_in_state(np.diag([0.0, 1.0]), RHO0)


class TestClassify:
    @pytest.mark.parametrize(
        "E, label",
        [
            (HALF, EffectClass.SEMITRANSPARENT),
            (np.eye(2), EffectClass.TRIVIAL_I),
            (np.diag([0.3, 0.1]), EffectClass.BELOW_SEMITRANSPARENT),
            (np.zeros((2, 2)), EffectClass.TRIVIAL_O),
            (np.diag([1.0, 0.0]), EffectClass.SHARP_PROJECTION),
            (np.diag([0.7, 0.2]), EffectClass.REGULAR),
            (np.diag([0.9, 0.6]), EffectClass.ABOVE_SEMITRANSPARENT),
            (np.diag([0.5, 0.2]), EffectClass.BELOW_SEMITRANSPARENT),
        ],
    )
    def test_examples(self, E, label):
        assert classify(E) is label

    def test_labels(self):
        assert str(EffectClass.SEMITRANSPARENT) == "Semitransparent"

    @given(effects())
    @settings(max_examples=300, deadline=None)
    def test_exhaustive_and_consistent(self, E):
        c = classify(E)
        if c is EffectClass.REGULAR:
            assert is_regular(E) and not is_sharp(E)
        if c is EffectClass.SHARP_PROJECTION:
            assert is_sharp(E)
        if c in (EffectClass.BELOW_SEMITRANSPARENT, EffectClass.ABOVE_SEMITRANSPARENT):
            assert not is_regular(E)
