import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mu_domains.domains import BetaPair, genuine_conflict
from mu_domains.errors import HypothesisViolated, InfeasibleProblem, OutsideDomain
from mu_domains.schwarz import (
    G2_CONDITIONS,
    TETRA_CONDITIONS,
    Feasibility,
    SchwarzProblem,
    condition10_witness,
    g2_condition9_as_printed,
    g2_condition_margins,
    g2_feasibility,
    g2_lempert_arrays,
    lempert_origin_g2,
    lempert_origin_tetra,
    tetra_condition_margins,
    tetra_feasibility,
)

from conftest import g2_interior, punctured_disc, tetra_interior

BAND = 1e-9


def test_problem_validation():
    for lam in (0, 1, 1.5j):
        with pytest.raises(ValueError):
            SchwarzProblem.tetra(lam, (0, 0, 0))
    assert SchwarzProblem.g2(0.5j, (1, 0.25)).lambda0 == 0.5j


# -- tetrablock ------------------------------------------------------------------

@pytest.mark.parametrize("lam", [0.01, 0.5j, -0.99])
def test_origin_target_is_always_feasible(lam):
    r = tetra_feasibility(SchwarzProblem.tetra(lam, (0, 0, 0)))
    assert r.feasible is Feasibility.FEASIBLE
    assert r.lempert == 0
    assert r.margin("2") == pytest.approx(abs(lam))
    assert all(c.verdict is Feasibility.FEASIBLE for c in r.conditions)


def test_feasible_example():
    r = tetra_feasibility(SchwarzProblem.tetra(0.6, (0.3, 0, 0.2)))
    assert r.feasible is Feasibility.FEASIBLE
    assert r.lempert == pytest.approx(0.5, abs=1e-15)
    assert r.margin("2") == pytest.approx(0.1, abs=1e-15)
    assert all(c.verdict is Feasibility.FEASIBLE for c in r.conditions)
    assert r.branch == "psi"
    assert r.beta.beta1 == pytest.approx(0.5625, abs=1e-15)
    assert r.beta.beta2 == pytest.approx(-0.1875, abs=1e-15)
    assert r.consistent


def test_infeasible_example():
    r = tetra_feasibility(SchwarzProblem.tetra(0.4, (0.3, 0, 0.2)))
    assert r.feasible is Feasibility.INFEASIBLE
    assert all(c.verdict is Feasibility.INFEASIBLE for c in r.conditions)
    assert r.beta is None


def test_both_quotients_of_the_example():
    m = tetra_condition_margins(0.3, 0, 0.2, 0.6)
    q2 = (0.06 + 0.2) / 0.91
    assert float(m["2"]) == pytest.approx(0.6 - max(0.5, q2), abs=1e-15)
    assert set(m) == set(TETRA_CONDITIONS)


@pytest.mark.parametrize("x, value", [((0, 0, 0), 0.0), ((0.3, 0, 0.2), 0.5), ((0.5, 0.5, 0.25), 0.5)])
def test_lempert_tetra_examples(x, value):
    assert lempert_origin_tetra(x) == pytest.approx(value, abs=1e-12)


def test_lempert_tetra_outside():
    with pytest.raises(OutsideDomain):
        lempert_origin_tetra((1.2, 0, 0))


def test_condition10_witness_reconstructs_target():
    prob = SchwarzProblem.tetra(0.6, (0.3, 0, 0.2))
    pair, branch = condition10_witness(prob)
    lam, (a, b, p) = prob.lambda0, prob.target
    assert branch == "psi"
    assert a == pytest.approx(pair.beta1 * lam + pair.beta2.conjugate() * p, abs=1e-15)
    assert b == pytest.approx(pair.beta2 + pair.beta1.conjugate() * p / lam, abs=1e-15)
    assert pair.weight <= 1
    with pytest.raises(InfeasibleProblem):
        condition10_witness(SchwarzProblem.tetra(0.4, (0.3, 0, 0.2)))


def test_upsilon_branch_for_larger_second_coordinate():
    r = tetra_feasibility(SchwarzProblem.tetra(0.6, (0, 0.3, 0.2)))
    assert r.feasible is Feasibility.FEASIBLE
    assert r.branch == "upsilon"


def test_boundary_target_warns():
    with pytest.warns(HypothesisViolated):
        r = tetra_feasibility(SchwarzProblem.tetra(0.5, (1, 0, 0)))
    assert r.notes


def test_interior_target_does_not_warn():
    with warnings.catch_warnings():
        warnings.simplefilter("error", HypothesisViolated)
        tetra_feasibility(SchwarzProblem.tetra(0.5, (0.1, 0.1, 0)))


@given(tetra_interior(0.999), punctured_disc())
def test_tetra_conditions_agree(x, lam):
    m = tetra_condition_margins(*x, lam)
    assert not genuine_conflict(m, BAND), {k: float(v) for k, v in m.items()}


@given(tetra_interior(0.99), st.floats(0, 2 * np.pi), st.floats(1e-6, 0.5))
def test_threshold_is_sharp(x, theta, rel):
    t = lempert_origin_tetra(x)
    if not 1e-3 < t < 0.99:
        return
    above = min(t * (1 + rel), 0.999)
    below = t * (1 - rel)
    rot = np.exp(1j * theta)
    assert tetra_feasibility(SchwarzProblem.tetra(above * rot, x)).feasible is not Feasibility.INFEASIBLE
    assert tetra_feasibility(SchwarzProblem.tetra(below * rot, x)).feasible is not Feasibility.FEASIBLE


def test_vectorised_margins_match_scalar_reports():
    rng = np.random.default_rng(5)
    a, b, p = (0.3 * (rng.normal(size=20) + 1j * rng.normal(size=20)) for _ in range(3))
    lam = 0.7 * np.exp(1j * rng.uniform(0, 6, 20))
    m = tetra_condition_margins(a, b, p, lam)
    for k in range(20):
        mk = tetra_condition_margins(a[k], b[k], p[k], lam[k])
        for cid in TETRA_CONDITIONS:
            assert float(mk[cid]) == float(m[cid][k])


# -- symmetrized bidisc ---------------------------------------------------------

@pytest.mark.parametrize("y, value", [((0, 0), 0.0), ((1, 0.25), 0.5), ((0, 0.3j), 0.3), ((0, -0.7), 0.7)])
def test_lempert_g2_examples(y, value):
    assert lempert_origin_g2(y) == pytest.approx(value, abs=1e-12)


def test_g2_feasibility_examples():
    r = g2_feasibility(SchwarzProblem.g2(0.6, (1, 0.25)))
    assert r.feasible is Feasibility.FEASIBLE
    assert r.margin("2") == pytest.approx(0.1, abs=1e-15)
    assert r.margin("E2") == pytest.approx(r.margin("2"), abs=1e-15)
    r = g2_feasibility(SchwarzProblem.g2(0.4, (1, 0.25)))
    assert r.feasible is Feasibility.INFEASIBLE
    assert all(c.verdict is Feasibility.INFEASIBLE for c in r.conditions)
    assert g2_feasibility(SchwarzProblem.g2(0.3, (0, 0))).feasible is Feasibility.FEASIBLE


def test_lempert_g2_outside():
    with pytest.raises(OutsideDomain):
        lempert_origin_g2((3, 0))


@given(g2_interior(), punctured_disc())
def test_g2_conditions_agree_with_each_other_and_the_tetrablock(y, lam):
    m = g2_condition_margins(*y, lam)
    assert set(G2_CONDITIONS) <= set(m)
    assert any(k.startswith("E") for k in m)
    assert not genuine_conflict(m, BAND), {k: float(v) for k, v in m.items()}


@given(g2_interior())
def test_g2_threshold_equals_tetra_threshold_of_embedding(y):
    s, p = y
    assert float(g2_lempert_arrays(s, p)) == pytest.approx(lempert_origin_tetra((s / 2, s / 2, p)), abs=1e-9)


def test_single_beta_display_is_not_equivalent():
    # s = 0.5, p = 0 needs |lambda0| >= 1/3, yet the single-beta form accepts
    # beta = s/2 = 0.25 through its second alternative at lambda0 = 0.3
    s, p, lam = 0.5, 0.0, 0.3
    assert lempert_origin_g2((s, p)) == pytest.approx(1 / 3)
    m = g2_condition_margins(s, p, lam)
    assert float(m["2"]) < -BAND and float(m["9"]) < -BAND
    assert float(g2_condition9_as_printed(s, p, lam)) > BAND


def test_g2_report_attaches_beta_witness():
    r = g2_feasibility(SchwarzProblem.g2(0.6, (1, 0.25)))
    assert isinstance(r.beta, BetaPair)
    assert r.matrix is not None and not r.matrix.exceeds_ball
