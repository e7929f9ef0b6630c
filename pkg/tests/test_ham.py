import json
import math
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from hamlab.ham import (
    AuxLinearOp,
    HamConfig,
    HomogeneousMode,
    ResonantForcing,
    UnboundedMode,
    chi,
    exp_decay_operator,
    ham_solve,
    homotopy_residual,
    nu_coefficients,
    problem_a_initial,
    problem_a_ode,
    rm_term,
    solve_deformation_step,
    solve_problem_a,
)
from hamlab.series import BasisMismatch, Basis, TruncatedSeries, exp_decay
from hamlab.verification import brute_force_rm, nu_gaps

F = Fraction
N = problem_a_ode()


def sech(t):
    return 1 / math.cosh(t)


def test_homotopy_residual_q0_on_kernel():
    u0 = problem_a_initial(5)
    assert homotopy_residual(u0, 0, -1, exp_decay_operator(5), N).is_zero()


def test_homotopy_residual_q1_on_truncated_exact_representation():
    rep = exp_decay({2 * m + 1: 2.0 * (-1) ** m for m in range(8)}, 15, exact=False)
    res = homotopy_residual(rep, 1, -1, exp_decay_operator(15, exact=False), N)
    assert max(abs(c) for c in res.coeffs) <= 1e-3


@pytest.mark.parametrize("h", [-1, F(-1, 2), 3])
def test_homotopy_residual_q1_is_minus_h_n(h):
    u = exp_decay({1: 1, 3: F(-1, 4)}, 9)
    res = homotopy_residual(u, 1, h, exp_decay_operator(9), N)
    assert res == N.residual(u).scale(-h)


def test_rm_first_order():
    u0 = problem_a_initial(5)
    assert rm_term([u0], 1, N) == exp_decay({3: 2}, 5)
    assert rm_term([TruncatedSeries.zeros(u0.basis, 5)], 1, N).is_zero()


def test_rm_second_order_against_sympy():
    # with x = exp(-t), d/dt acts as -x d/dx
    x, h = sp.symbols("x h")
    dt = lambda f: -x * sp.diff(f, x)
    U0 = x
    U1 = h / 4 * (x**3 - x)
    r2 = sp.Poly(sp.expand(dt(dt(U1)) - U1 + 2 * 3 * U0**2 * U1), x)
    hv = F(-3, 5)
    expected = [F(str(r2.coeff_monomial(x**k).subs(h, sp.Rational(-3, 5)))) for k in range(8)]
    u1 = exp_decay({1: -hv / 4, 3: hv / 4}, 7)
    got = rm_term([problem_a_initial(7), u1], 2, N)
    assert list(got.coeffs) == expected
    assert set(got.support()) <= {1, 3, 5}


def test_first_deformation_step():
    cfg = HamConfig(h=F(-3, 7), max_order=1)
    L = exp_decay_operator(cfg.budget)
    u1 = solve_deformation_step([problem_a_initial(cfg.budget)], 1, cfg.h, L, N, cfg)
    assert u1 == exp_decay({1: -cfg.h / 4, 3: cfg.h / 4}, cfg.budget)
    assert L.apply(u1) == rm_term([problem_a_initial(cfg.budget)], 1, N).scale(cfg.h)


def test_first_step_h_minus_one():
    sol = solve_problem_a(-1, 1)
    assert sol.terms[1] == exp_decay({1: F(1, 4), 3: F(-1, 4)}, 5)
    assert sol.solution == exp_decay({1: F(5, 4), 3: F(-1, 4)}, 5)


def test_zero_forcing_step():
    cfg = HamConfig(h=-1, max_order=3)
    prev = exp_decay({3: 1, 1: -1}, cfg.budget)
    zero = TruncatedSeries.zeros(prev.basis, cfg.budget)
    L = exp_decay_operator(cfg.budget)
    assert solve_deformation_step([prev, prev], 2, -1, L, N, cfg, rm=zero) == prev
    assert solve_deformation_step([prev], 1, -1, L, N, cfg, rm=zero).is_zero()


def test_resonant_forcing_raises():
    cfg = HamConfig(h=-1, max_order=2)
    L = exp_decay_operator(cfg.budget)
    rm = exp_decay({1: 1, 3: 1}, cfg.budget)
    with pytest.raises(ResonantForcing):
        solve_deformation_step([problem_a_initial(cfg.budget)], 1, -1, L, N, cfg, rm=rm)


def test_unbounded_mode_raises():
    cfg = HamConfig(h=-1, max_order=2)
    base = exp_decay_operator(cfg.budget)
    only_growing = AuxLinearOp(
        "u'' - u, growing kernel only",
        base.apply,
        base.element_inverse,
        tuple(HomogeneousMode(m.series, False) for m in base.homogeneous_modes),
    )
    with pytest.raises(UnboundedMode):
        solve_deformation_step([problem_a_initial(cfg.budget)], 1, -1, only_growing, N, cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        HamConfig(h=0, max_order=2)
    with pytest.raises(ValueError):
        HamConfig(h=-1, max_order=-1)
    with pytest.raises(ValueError):
        ham_solve(N, exp_decay_operator(5), exp_decay({1: 2}, 5), HamConfig(h=-1, max_order=1))


def test_zeroth_order_is_u0():
    sol = solve_problem_a(-1, 0)
    assert sol.solution == problem_a_initial(3)
    assert nu_coefficients(sol) == [0, 1, 0, 0]


def test_nu_first_order():
    nu = solve_problem_a(-1, 1).nu()
    assert nu[1] == F(5, 4) and nu[3] == F(-1, 4)


def test_nu_requires_exp_basis():
    from hamlab.ham import DeformationSolution

    sol = DeformationSolution((TruncatedSeries(Basis.power(0), [1, 0]),), -1)
    with pytest.raises(BasisMismatch):
        nu_coefficients(sol)


def test_even_indices_vanish_exactly():
    nu = solve_problem_a(-1, 12).nu()
    assert all(nu[n] == 0 for n in range(0, len(nu), 2))


def test_bc_and_boundedness_invariants():
    for m in range(9):
        sol = solve_problem_a(-1, m)
        assert sol.solution.evaluate(0) == 1
        assert all(u.evaluate(0) == 0 for u in sol.terms[1:])
        assert all(u.basis.kind == "expdecay" for u in sol.terms)


def test_float_mode_matches_exact():
    ex = solve_problem_a(-1, 8).nu()
    fl = solve_problem_a(-1, 8, exact=False).nu()
    assert max(abs(float(a) - b) for a, b in zip(ex, fl)) < 1e-13
    assert abs(solve_problem_a(-1, 8, exact=False).solution.evaluate(0.0) - 1) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 8), st.fractions(min_value=-2, max_value=F(-1, 10), max_denominator=40))
def test_deformation_equation_exact(order, h):
    sol = solve_problem_a(h, order)
    L = exp_decay_operator(sol.terms[0].order)
    for m in range(1, order + 1):
        lhs = L.apply(sol.terms[m] - sol.terms[m - 1].scale(chi(m)))
        assert lhs == brute_force_rm(list(sol.terms), m).scale(h)


def test_error_nonincreasing_in_order():
    ts = (0.5, 1, 2, 4)
    errs = [max(abs(solve_problem_a(-1, m, exact=False)(t) - sech(t)) for t in ts) for m in range(2, 13)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))


@pytest.mark.xfail(strict=True, reason="h=-1 HAM error decays like M^-1/2; ~0.078 at M=12")
def test_error_below_1e3_at_order_12():
    sol = solve_problem_a(-1, 12, exact=False)
    assert max(abs(sol(t) - sech(t)) for t in (1, 2, 4)) < 1e-3


def test_half_power_convergence_rate():
    # q=1 is a square-root branch point of the homotopy, so quadrupling M halves the gap
    g = {m: 2 - solve_problem_a(-1, m, exact=False).nu()[1] for m in (15, 60)}
    assert 0.45 < g[60] / g[15] < 0.55


def test_nu_gap_decreases():
    g4, g8, g12 = (nu_gaps(solve_problem_a(-1, m).nu()) for m in (4, 8, 12))
    assert all(a > b > c for a, b, c in zip(g4, g8, g12))


def test_solution_json():
    sol = solve_problem_a(-1, 1)
    data = json.loads(json.dumps(sol.to_json()))
    assert data["h"] == -1
    assert data["nu"][:4] == ["0/1", "5/4", "0/1", "-1/4"]
    assert TruncatedSeries.from_json(data["terms"][1]) == sol.terms[1]


def test_float_h_in_exact_mode_reads_decimal():
    sol = solve_problem_a(-0.05, 1)
    assert sol.terms[1][3] == F(-1, 80)
