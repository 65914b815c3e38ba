import numpy as np
import pytest
from hypothesis import given, strategies as st

from entobs.entanglement import (ObservableVector, ScenarioKind, ScenarioPoint, Variant, discrepancy,
                                 family_negativity, negativity_batch, negativity_oracle, observable_negativity,
                                 partial_transpose, scenario_negativity)
from entobs.errors import DomainError
from entobs.states import FamilyParams, build_family, random_family_params

from conftest import bell_projector


def brute_pt(rho):
    out = np.zeros_like(rho)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    out[2 * a + b, 2 * c + d] = rho[2 * a + d, 2 * c + b]
    return out


def random_state(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = a @ a.conj().T
    return m / np.trace(m).real


# -- partial transpose and oracle -------------------------------------------------


def test_partial_transpose_diagonal_unchanged():
    d = np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex)
    np.testing.assert_array_equal(partial_transpose(d), d)


def test_partial_transpose_bell_moves_coherences():
    pt = partial_transpose(bell_projector())
    assert pt[1, 2] == pytest.approx(0.5) and pt[2, 1] == pytest.approx(0.5)
    assert pt[0, 3] == 0 and pt[3, 0] == 0


def test_partial_transpose_matches_index_formula(rng):
    for _ in range(20):
        rho = random_state(rng)
        np.testing.assert_array_equal(partial_transpose(rho), brute_pt(rho))
        np.testing.assert_array_equal(partial_transpose(partial_transpose(rho)), rho)


def test_oracle_examples():
    assert negativity_oracle(np.eye(4) / 4) == 0.0
    assert negativity_oracle(bell_projector()) == pytest.approx(0.5, abs=1e-14)
    werner = 0.5 * bell_projector() + 0.5 * np.eye(4) / 4
    assert negativity_oracle(werner) == pytest.approx(0.125, abs=1e-14)


def test_oracle_matches_lapack(rng):
    rhos = np.stack([random_state(rng) for _ in range(200)])
    ref = np.array([-np.minimum(np.linalg.eigvalsh(brute_pt(r)), 0).sum() for r in rhos])
    np.testing.assert_allclose(negativity_batch(rhos), ref, atol=1e-13)


def test_oracle_invariant_under_local_unitaries(rng):
    for _ in range(20):
        rho = random_state(rng)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        qa, _ = np.linalg.qr(a)
        qb, _ = np.linalg.qr(b)
        u = np.kron(qa, qb)
        assert negativity_oracle(u @ rho @ u.conj().T) == pytest.approx(negativity_oracle(rho), abs=1e-12)


@given(st.floats(0, 0.5), st.floats(0, 0.5), st.floats(0, 1), st.floats(0, 2 * np.pi))
def test_convexity_for_family_1(v1, v2, lam, alpha):
    r1 = build_family(FamilyParams(1, v=v1, a=0.5, alpha=alpha)).matrix
    r2 = build_family(FamilyParams(1, v=v2, a=0.5, alpha=alpha)).matrix
    mix = negativity_oracle(lam * r1 + (1 - lam) * r2)
    assert mix <= lam * negativity_oracle(r1) + (1 - lam) * negativity_oracle(r2) + 1e-11


def test_negativity_bounds(rng):
    n = negativity_batch(np.stack([random_state(rng) for _ in range(500)]))
    assert np.all(n >= 0) and np.all(n <= 0.5 + 1e-12)


# -- closed forms ---------------------------------------------------------------------


def test_family_1_closed_form():
    p = FamilyParams(1, v=0.5, a=0.5)
    assert family_negativity(p, "as_printed") == family_negativity(p, "corrected") == 0.5


def test_family_3_closed_forms():
    p = FamilyParams(3, v=0.3, c=0.3, d=0.2)
    assert family_negativity(p, Variant.AS_PRINTED) == pytest.approx(np.sqrt(0.13) - 0.2, abs=1e-15)
    assert family_negativity(p, Variant.AS_PRINTED) == pytest.approx(0.1605551, abs=1e-7)
    assert family_negativity(p, Variant.CORRECTED) == pytest.approx(0.2162278, abs=1e-7)
    assert family_negativity(p, Variant.CORRECTED) == pytest.approx(negativity_oracle(build_family(p)), abs=1e-15)


@pytest.mark.parametrize("family", range(1, 7))
def test_no_coherence_no_negativity(family):
    p = random_family_params(family, np.random.default_rng(family))
    p = FamilyParams(family, v=0.0, alpha=p.alpha, **p.weights())
    assert family_negativity(p, "as_printed") == 0.0
    assert family_negativity(p, "corrected") == 0.0


@pytest.mark.parametrize("family", range(1, 7))
def test_corrected_closed_form_matches_oracle(family):
    rng = np.random.default_rng(100 + family)
    for _ in range(300):
        p = random_family_params(family, rng)
        assert family_negativity(p) == pytest.approx(negativity_oracle(build_family(p)), abs=1e-12)


# -- observable relations ------------------------------------------------------------------


def test_observable_relation_bell():
    obs = ObservableVector.of(bell_projector())
    assert (obs.s11, obs.s12) == pytest.approx((1.0, 0.0))
    assert observable_negativity(1, obs, "as_printed") == pytest.approx(0.5)
    assert observable_negativity(1, obs, "corrected") == pytest.approx(0.5)


def test_observable_relation_family_3():
    rho = build_family(FamilyParams(3, v=0.3, c=0.3, d=0.2))
    obs = ObservableVector.of(rho)
    assert (obs.s11, obs.s12, obs.sz) == pytest.approx((0.6, 0.0, -0.2), abs=1e-15)
    n = observable_negativity(3, obs)
    assert n == pytest.approx(0.5 * (np.sqrt(0.40) - 0.2), abs=1e-15)
    assert n == pytest.approx(negativity_oracle(rho), abs=1e-15)


def test_observable_relation_family_2_zero():
    assert observable_negativity(2, ObservableVector(0.0, 0.0, 0.0, 1.0)) == 0.0


@pytest.mark.parametrize("family", range(1, 7))
def test_corrected_observable_relation_matches_oracle(family):
    rng = np.random.default_rng(200 + family)
    for _ in range(300):
        rho = build_family(random_family_params(family, rng))
        assert observable_negativity(family, ObservableVector.of(rho)) == pytest.approx(
            negativity_oracle(rho), abs=1e-12)


@pytest.mark.parametrize("bad", [dict(sz=1.5), dict(s2=-0.1), dict(s2=2.5), dict(s11=np.nan)])
def test_observable_vector_range(bad):
    vals = dict(s11=0.0, s12=0.0, sz=0.0, s2=1.0) | bad
    with pytest.raises(ValueError):
        ObservableVector(**vals)


# -- scenario formulas --------------------------------------------------------------


@given(st.floats(0, np.pi / 2), st.floats(0, 2 * np.pi))
def test_psi_formula_matches_caption(theta, T):
    sz = -np.cos(2 * T) * np.cos(2 * theta)
    obs = ObservableVector(0.0, 0.0, float(sz), 2.0)
    expected = np.sqrt(1 - np.cos(2 * T) ** 2 * np.cos(2 * theta) ** 2) / 2
    assert scenario_negativity(ScenarioKind.PSI, obs) == pytest.approx(expected, abs=1e-12)


def test_phi_product_point():
    assert scenario_negativity("Phi", ObservableVector(0, 0, 0, 1.0)) == 0.0


def test_m1_at_time_zero():
    obs = ObservableVector(0, 0, 0.3, 2.0)
    assert scenario_negativity("M1", obs, obs) == 0.0


def test_m1_needs_initial_value():
    with pytest.raises(ValueError):
        scenario_negativity("M1", ObservableVector(0, 0, 0.3, 2.0))


def negative_radicand_state():
    # <S_z> = 0.8, <S^2> = 1.6: (2 - S2)^2 + (S2 - 1)^2 - Sz^2 = -0.12
    rho = np.diag([0.8, 0.1, 0.1, 0.0]).astype(complex)
    rho[1, 2] = rho[2, 1] = -0.1
    return rho


def test_printed_domain_error():
    obs = ObservableVector.of(negative_radicand_state())
    assert (obs.sz, obs.s2) == pytest.approx((0.8, 1.6))
    with pytest.raises(DomainError):
        scenario_negativity("M3456_H2x", obs, variant="as_printed")


def test_psi_printed_exceeds_bound():
    obs = ObservableVector(0.0, 0.0, -1.0, 2.0)
    assert scenario_negativity("Psi", obs, variant="as_printed") == pytest.approx(np.sqrt(2) / 2)
    assert scenario_negativity("Psi", obs) == 0.0


# -- discrepancy records ------------------------------------------------------------------


def test_discrepancy_family_1_exact():
    rec = discrepancy("f1", FamilyParams(1, v=0.3, a=0.4))
    assert rec.abs_deviation_printed <= 1e-15


def test_discrepancy_family_3():
    rec = discrepancy("f3", FamilyParams(3, v=0.3, c=0.3, d=0.2))
    assert rec.abs_deviation_printed == pytest.approx(0.0556727, abs=1e-7)
    assert rec.abs_deviation_corrected <= 1e-15


def test_discrepancy_family_2_without_coherence():
    rec = discrepancy("f2", FamilyParams(2, v=0.0, b=0.3))
    assert rec.printed_value == rec.corrected_value == rec.oracle_value == 0.0


def test_discrepancy_scenario_point_records_nan_on_domain_error():
    rec = discrepancy("m", ScenarioPoint(ScenarioKind.M3456_H2X, negative_radicand_state()))
    assert np.isnan(rec.printed_value) and np.isnan(rec.abs_deviation_printed)
    assert np.isfinite(rec.corrected_value)


def test_discrepancy_rejects_unknown_point():
    with pytest.raises(TypeError):
        discrepancy("x", object())
