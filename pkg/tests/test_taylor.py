import math
import random
from fractions import Fraction

import numpy as np
import pytest

from hamlab.taylor import (
    DOMB_SYKES,
    EXACT_LIMIT_ENV,
    RATIO_TEST,
    InsufficientTail,
    RadiusEstimate,
    TaylorExpansion,
    estimate_radius,
    predicted_radius,
    radius_rows_to_csv,
    radius_table,
    recenter,
    sech_expansion,
    sech_taylor_reference,
    taylor_from_ode,
)

F = Fraction
DISPLAYED = (1, 0, F(-1, 2), 0, F(5, 24), 0, F(-61, 720))


def sech(t):
    return 1 / math.cosh(t)


def test_ode_coefficients_match_displayed_series():
    assert taylor_from_ode(1, 0, 0, 6).coeffs == DISPLAYED


def test_reference_matches_displayed_series():
    assert sech_taylor_reference(6).coeffs == DISPLAYED
    assert sech_taylor_reference(0).coeffs == (1,)


@pytest.mark.parametrize("n", [2, 7, 16, 30])
def test_ode_and_reference_agree_exactly(n):
    a = taylor_from_ode(1, 0, 0, n)
    assert a.exact
    assert a.coeffs == sech_taylor_reference(n).coeffs


def test_trivial_solution():
    assert not any(taylor_from_ode(0, 0, 0, 20).coeffs)


def test_initial_value_invariant():
    assert taylor_from_ode(F(1, 3), F(1, 7), 1, 5).coeffs[:2] == (F(1, 3), F(1, 7))


def test_expansion_at_two_reproduces_sech():
    d = predicted_radius(2.0)
    exp = sech_expansion(2.0, 100)
    for t in np.linspace(2 - 0.7 * d, 2 + 0.7 * d, 20):
        assert abs(exp(t) - sech(t)) < 1e-6


def test_exact_limit_env_override(monkeypatch):
    monkeypatch.setenv(EXACT_LIMIT_ENV, "10")
    a = taylor_from_ode(1, 0, 0, 30)
    assert not a.exact
    assert a.coeffs[6] == pytest.approx(-61 / 720, rel=1e-15)
    monkeypatch.setenv(EXACT_LIMIT_ENV, "many")
    with pytest.raises(ValueError):
        taylor_from_ode(1, 0, 0, 30)


def test_recenter_linear_and_identity():
    p = TaylorExpansion(0, (1, 1))
    assert recenter(p, 1).coeffs == (2, 1)
    q = sech_expansion(0, 12)
    assert recenter(q, 0) == q


def test_recenter_exact_rational():
    p = TaylorExpansion(0, DISPLAYED)
    r = recenter(p, F(1, 3))
    assert r.exact
    for t in (F(-2), F(1, 5), F(7, 4)):
        assert r(t) == p(t)


def test_recenter_sech_partial_sum():
    s20 = sech_expansion(0, 20).to_float()
    r = recenter(s20, 0.5)
    assert abs(r(0.7) - s20(0.7)) < 1e-10


def test_recenter_random_points():
    rng = random.Random(7)
    p = TaylorExpansion(0.0, tuple(rng.uniform(-1, 1) for _ in range(11)))
    r = recenter(p, 0.4)
    for _ in range(50):
        t = rng.uniform(-1, 1)
        assert abs(r(t) - p(t)) < 1e-9


def test_recenter_trust_radius_warns():
    with pytest.warns(UserWarning):
        recenter(sech_expansion(0, 10), 2, trust_radius=math.pi / 2)


def test_predicted_radius():
    assert predicted_radius(0) == pytest.approx(math.pi / 2)
    assert predicted_radius(2) == pytest.approx(2.5431, abs=1e-4)
    vals = [predicted_radius(t) for t in (1, 10, 100, 1000)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert predicted_radius(1e6) / 1e6 == pytest.approx(1.0, abs=1e-9)
    assert 1e6 - predicted_radius(1e6) < 0


def test_radius_geometric():
    est = estimate_radius([2**k for k in range(21)])
    assert est.value == pytest.approx(0.5, rel=1e-12)
    assert est.method == "root"
    assert estimate_radius([2.0**k for k in range(21)], RATIO_TEST).value == pytest.approx(0.5)


def test_radius_sech_at_origin():
    est = estimate_radius(sech_expansion(0, 100).coeffs)
    assert abs(est.value / (math.pi / 2) - 1) < 0.05
    assert len(est.diagnostics) == est.tail_window


def test_radius_sech_at_two():
    est = estimate_radius(sech_expansion(2.0, 100).coeffs)
    assert abs(est.value / predicted_radius(2.0) - 1) < 0.05


@pytest.mark.parametrize("t0", [0, 0.5, 1, 2, 3])
def test_radius_law(t0):
    est = estimate_radius(sech_expansion(t0, 120).coeffs)
    assert 0.90 <= est.value / predicted_radius(t0) <= 1.10


def test_domb_sykes_real_axis_case():
    # at t0 = 0 the compressed series has a single singularity, so the plot is linear
    est = estimate_radius(sech_expansion(0, 100).coeffs, DOMB_SYKES)
    assert est.value == pytest.approx(math.pi / 2, rel=1e-3)


def test_insufficient_tail():
    with pytest.raises(InsufficientTail):
        estimate_radius(sech_expansion(0, 20).coeffs)
    with pytest.raises(ValueError):
        estimate_radius([1.0] * 40, method="bogus")


def test_radius_estimate_invariants():
    with pytest.raises(ValueError):
        RadiusEstimate(0.0, "root", 32)
    with pytest.raises(ValueError):
        RadiusEstimate(1.0, "root", 4)


@pytest.mark.parametrize("t0", [0, 0.5, 1, 2, 3])
def test_divergence_outside_radius(t0):
    a = sech_expansion(t0, 120).coeffs
    x = 1.05 * predicted_radius(t0)
    terms = [abs(c) * x**n for n, c in enumerate(a)]
    maxima = [max(terms[k : k + 20]) for k in (40, 60, 80, 100)]
    assert all(b > a for a, b in zip(maxima, maxima[1:]))


def test_radius_csv():
    rows = radius_table(t0s=(0, 2), n=120)
    text = radius_rows_to_csv(rows)
    lines = text.split("\n")
    assert lines[0] == "t0,method,N,estimate,predicted,relative_error"
    assert lines[1].startswith("0,root,120,")
    assert rows[1].predicted == pytest.approx(2.5431, abs=1e-4)
    assert all(r.relative_error <= 0.10 for r in rows)
