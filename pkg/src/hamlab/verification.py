"""Named numerical checks run by ``hamlab verify``."""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable

from . import ham, problems, taylor
from .series import TruncatedSeries


@dataclass
class Check:
    name: str
    measured: float
    bound: float
    relation: str
    passed: bool
    seconds: float = 0.0

    def to_json(self) -> dict:
        return asdict(self)


def _check(name: str, measured: float, bound: float, relation: str = "<") -> Check:
    ok = {"<": measured < bound, "<=": measured <= bound, ">": measured > bound, "==": measured == bound}[relation]
    return Check(name, float(measured), float(bound), relation, bool(ok))


def nu_target(n: int) -> int:
    if n % 2 == 0:
        return 0
    return 2 if (n // 2) % 2 == 0 else -2


def nu_gaps(nu: list, max_index: int = 9) -> list[Fraction]:
    """Distance to the limiting pattern for each odd index up to ``max_index``."""
    return [abs(Fraction(nu[n]) - nu_target(n)) for n in range(1, max_index + 1, 2)]


def coefficient_identity() -> list[Check]:
    start = time.perf_counter()
    ode = taylor.taylor_from_ode(1, 0, 0, 30).coeffs
    ref = taylor.sech_taylor_reference(30).coeffs
    elapsed = time.perf_counter() - start
    displayed = (1, 0, Fraction(-1, 2), 0, Fraction(5, 24), 0, Fraction(-61, 720))
    mismatches = sum(a != b for a, b in zip(ode, ref)) + sum(a != b for a, b in zip(ode, displayed))
    return [
        _check("taylor_from_ode == sech reference (exact, N=30) mismatches", mismatches, 0, "=="),
        _check("coefficient identity runtime [s]", elapsed, 1.0),
    ]


def nu_pattern() -> list[Check]:
    start = time.perf_counter()
    sols = {m: ham.solve_problem_a(-1, m, exact=True) for m in range(13)}
    elapsed = time.perf_counter() - start
    nonzero_even = sum(1 for s in sols.values() for n, c in enumerate(s.nu()) if n % 2 == 0 and c != 0)
    gaps = list(zip(*(nu_gaps(sols[m].nu()) for m in (4, 8, 12))))
    return [
        _check("even-index nu nonzero count, M<=12", nonzero_even, 0, "=="),
        _check("|nu_1(M=12) - 2|", abs(sols[12].nu()[1] - 2), 1e-2),
        _check(
            "odd nu_n gaps (n<=9) decreasing over M=4,8,12 (violations)",
            sum(b >= a for g in gaps for a, b in zip(g, g[1:])),
            0,
            "==",
        ),
        _check("nu pattern runtime [s]", elapsed, 10.0),
    ]


def radius_law() -> list[Check]:
    start = time.perf_counter()
    rows = taylor.radius_table(n=120)
    elapsed = time.perf_counter() - start
    return [
        _check("max radius relative error, t0 in {0,.5,1,2,3}", max(r.relative_error for r in rows), 0.10, "<="),
        _check("radius relative error at t0=0", rows[0].relative_error, 0.05, "<="),
        _check("radius law runtime [s]", elapsed, 5.0),
    ]


def local_vs_global() -> list[Check]:
    t2 = taylor.sech_expansion(2.0, 100)
    sol = ham.solve_problem_a(-1, 30, exact=False)
    sech = problems.sech_exact
    return [
        _check("|Taylor(t0=2,N=100)(5) - sech(5)|", abs(t2(5.0) - sech(5.0)), 1e3, ">"),
        _check("|HAM S_30(5) - sech(5)|, h=-1", abs(sol(5.0) - sech(5.0)), 1e-6),
        _check("|Taylor(t0=2,N=100)(2.5) - sech(2.5)|", abs(t2(2.5) - sech(2.5)), 1e-6),
        _check("|HAM S_30(2.5) - sech(2.5)|, h=-1", abs(sol(2.5) - sech(2.5)), 1e-6),
    ]


def exact_residuals() -> list[Check]:
    grid_a = problems.grid(0.25, 5.0, 0.25)
    grid_b = [0.001, 0.01] + problems.grid(0.05, 3.0, 0.05)
    return [
        _check("max |residual_A(sech)| on [0.25, 5]", max(abs(problems.residual_a(problems.sech_exact, t)) for t in grid_a), 1e-6),
        _check("max |residual_B(exp(-1/t))| on (0, 3]", max(abs(problems.residual_b(problems.problem_b_exact, t)) for t in grid_b), 1e-6),
        _check("max |L2[exp(-1/t)]| on {0.05,0.5,1,2}", problems.verify_l2_kernel([0.05, 0.5, 1.0, 2.0]), 1e-12),
    ]


def global_representation() -> list[Check]:
    ts = [s * t for t in problems.grid(0.5, 10.0, 0.05) for s in (1, -1)]
    err = max(abs(problems.global_exp_representation(t, 30) - problems.sech_exact(t)) for t in ts)
    return [_check("max |global rep (M=30) - sech| for |t| >= 0.5", err, 1e-8)]


def brute_force_rm(terms: list[TruncatedSeries], m: int) -> TruncatedSeries:
    """``U''_{m-1} - U_{m-1} + 2 sum_{i+j+k=m-1} U_i U_j U_k`` by direct triple loop."""
    prev = terms[m - 1]
    out = prev.differentiate().differentiate() - prev
    for i in range(m):
        for j in range(m - i):
            k = m - 1 - i - j
            out = out + terms[i].mul(terms[j]).mul(terms[k]).scale(2)
    return out


def deformation_correctness(samples: int = 20, seed: int = 2024) -> list[Check]:
    rng = random.Random(seed)
    failures = 0
    steps = 0
    for _ in range(samples):
        order = rng.randint(1, 8)
        h = -Fraction(rng.randint(10, 200), 100)
        sol = ham.solve_problem_a(h, order, exact=True)
        L = ham.exp_decay_operator(sol.terms[0].order)
        for m in range(1, order + 1):
            lhs = L.apply(sol.terms[m] - sol.terms[m - 1].scale(ham.chi(m)))
            rhs = brute_force_rm(list(sol.terms), m).scale(h)
            steps += 1
            failures += lhs.coeffs != rhs.coeffs
    return [_check(f"deformation equation violations ({steps} steps)", failures, 0, "==")]


def oham_dominance() -> list[Check]:
    start = time.perf_counter()
    res = problems.optimal_h(problems.PROBLEM_A, 5)
    elapsed = time.perf_counter() - start
    return [
        _check("residual(h*) - residual(-1), M=5", res.report.l2_norm - res.sweep[-1.0], 0.0, "<="),
        _check("OHAM sweep runtime [s]", elapsed, 30.0),
    ]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "coefficient-identity": coefficient_identity,
    "nu-pattern": nu_pattern,
    "radius-law": radius_law,
    "local-vs-global": local_vs_global,
    "exact-residuals": exact_residuals,
    "global-representation": global_representation,
    "deformation-correctness": deformation_correctness,
    "oham-dominance": oham_dominance,
}


def run_all() -> dict[str, list[Check]]:
    out = {}
    for name, suite in SUITES.items():
        start = time.perf_counter()
        checks = suite()
        for c in checks:
            c.seconds = round(time.perf_counter() - start, 6)
        out[name] = checks
    return out
