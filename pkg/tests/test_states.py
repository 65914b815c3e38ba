import numpy as np
import pytest
from hypothesis import given, strategies as st

from entobs.errors import InvalidWeights, NotHermitian, NotPositive, PositivityViolation, TraceNotOne
from entobs.spin import expectation, total_spin_squared, total_spin_z
from entobs.states import (FamilyParams, MixedInitialState, PureInitialState, build_family, classify_family,
                           mixed_initial, printed_mixed_6, pure_initial, random_family_params,
                           validate_density_matrix)
from entobs.entanglement import negativity_oracle

from conftest import bell_projector


def test_family_1_bell():
    rho = build_family(FamilyParams(1, v=0.5, a=0.5))
    np.testing.assert_allclose(rho.matrix, bell_projector(), atol=1e-15)


def test_family_3_valid_and_violation():
    build_family(FamilyParams(3, v=0.3, c=0.3, d=0.2))
    with pytest.raises(PositivityViolation):
        build_family(FamilyParams(3, v=0.45, c=0.3, d=0.2))


@pytest.mark.parametrize("p", [FamilyParams(3, v=0.1, c=0.7, d=0.5), FamilyParams(1, v=0.1, a=1.2),
                               FamilyParams(2, v=0.1, b=0.5, a=0.1), FamilyParams(4, v=-0.1, a=0.3, b=0.3),
                               FamilyParams(4, v=0.1, a=np.nan, b=0.3)])
def test_invalid_weights(p):
    with pytest.raises(InvalidWeights):
        build_family(p)


def test_family_matrix_is_read_only():
    rho = build_family(FamilyParams(2, v=0.2, b=0.4))
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


def test_validate_examples():
    validate_density_matrix(np.eye(4) / 4)
    with pytest.raises(TraceNotOne):
        validate_density_matrix(np.diag([1.0, 1.0, 0.0, 0.0]))
    with pytest.raises(NotPositive):
        validate_density_matrix(np.diag([1.5, -0.5, 0.0, 0.0]))
    with pytest.raises(NotHermitian):
        validate_density_matrix(printed_mixed_6(0.3))


@pytest.mark.parametrize("family", range(1, 7))
def test_random_family_states_are_valid(family):
    rng = np.random.default_rng(family)
    for _ in range(200):
        p = random_family_params(family, rng)
        rho = build_family(p)
        validate_density_matrix(rho)
        assert family in classify_family(rho)


def test_classify_bell():
    found = classify_family(bell_projector())
    assert set(found) == {1, 5, 6}
    assert found[5].c == pytest.approx(0.0) and found[5].d == pytest.approx(0.5)
    assert found[6].b == pytest.approx(0.0) and found[6].d == pytest.approx(0.5)


def test_classify_maximally_mixed():
    assert classify_family(np.eye(4) / 4) == {}


def test_classify_family_2_containment():
    found = classify_family(build_family(FamilyParams(2, v=0.2, b=0.4, alpha=1.0)))
    assert set(found) == {2, 3, 4}
    assert found[3].d == 0.0 and found[4].a == 0.0
    for f in (2, 3, 4):
        assert found[f].v == pytest.approx(0.2) and found[f].alpha == pytest.approx(1.0)


def test_classify_rejects_bad_tol():
    with pytest.raises(ValueError):
        classify_family(np.eye(4) / 4, tol=0.0)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_extract_round_trip(family, seed):
    p = random_family_params(family, np.random.default_rng(seed))
    q = classify_family(build_family(p))[family]
    np.testing.assert_allclose(build_family(q).matrix, build_family(p).matrix, atol=1e-14)


def test_pure_states():
    np.testing.assert_allclose(pure_initial(PureInitialState("Psi", np.pi / 2)).matrix,
                               np.diag([1, 0, 0, 0]), atol=1e-15)
    bell = pure_initial(PureInitialState("Psi", np.pi / 4, 0.0))
    np.testing.assert_allclose(bell.matrix, bell_projector(), atol=1e-15)
    assert negativity_oracle(bell) == pytest.approx(0.5, abs=1e-14)
    singlet = pure_initial(PureInitialState("PhiMinus", np.pi / 4))
    assert abs(expectation(total_spin_squared(), singlet)) < 1e-15


def test_phi_kinds_fix_alpha():
    assert PureInitialState("PhiMinus", 0.1).alpha == np.pi
    with pytest.raises(ValueError):
        PureInitialState("PhiPlus", 0.1, alpha=1.0)


@given(st.sampled_from(["Psi", "PhiPlus", "PhiMinus"]), st.floats(0, np.pi / 2), st.floats(0, 2 * np.pi))
def test_pure_states_are_valid(kind, theta, alpha):
    st_ = PureInitialState(kind, theta, alpha if kind == "Psi" else None)
    rho = validate_density_matrix(pure_initial(st_))
    np.testing.assert_allclose(rho.matrix @ rho.matrix, rho.matrix, atol=1e-14)


def test_mixed_states():
    np.testing.assert_allclose(mixed_initial(MixedInitialState(1, np.pi / 2)).matrix, np.diag([1, 0, 0, 0]),
                               atol=1e-15)
    th = 0.37
    np.testing.assert_allclose(mixed_initial(MixedInitialState(3, th)).matrix,
                               np.diag([0, 0, np.sin(th) ** 2, np.cos(th) ** 2]), atol=1e-16)
    assert expectation(total_spin_z(), mixed_initial(MixedInitialState(5, th))) == pytest.approx(np.sin(th) ** 2)


@given(st.integers(1, 6), st.floats(0, np.pi / 2))
def test_mixed_states_are_separable_and_valid(kind, theta):
    rho = validate_density_matrix(mixed_initial(MixedInitialState(kind, theta)))
    assert negativity_oracle(rho) <= 1e-15


def test_mixed_kind_range():
    with pytest.raises(ValueError):
        MixedInitialState(7, 0.1)


def test_printed_sixth_mixture_is_not_hermitian():
    m = printed_mixed_6(np.pi / 3)
    assert np.max(np.abs(m - m.conj().T)) == pytest.approx(np.sin(np.pi / 3) ** 2)
