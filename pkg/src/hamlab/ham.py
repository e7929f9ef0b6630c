"""Homotopy analysis method on exponential (or other diagonal) bases.

The homotopy ``H[u] = (1 - q) L[u] - h q N[u]`` is expanded order by order in
the embedding parameter ``q``. Each order gives the linear problem

    L[U_m - chi_m U_{m-1}] = h R_m,      chi_1 = 0, chi_m = 1 (m >= 2)

where ``R_m`` is the ``q**(m-1)`` coefficient of ``N[sum_k U_k q**k]``. The
auxiliary operator must act diagonally on the basis, so that a right-hand
side is inverted element by element; its kernel is then used to restore the
boundary condition at ``bc_point``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .series import EXP_DECAY, EXP_GROWTH, BasisMismatch, Number, TruncatedSeries, exp_decay


class HamError(ArithmeticError):
    pass


class ResonantForcing(HamError):
    """Right-hand side has a component in the kernel of the linear operator."""


class UnboundedMode(HamError):
    """Boundary condition can only be met with an inadmissible kernel mode."""


@dataclass(frozen=True)
class HomogeneousMode:
    series: TruncatedSeries
    admissible: bool


@dataclass(frozen=True)
class AuxLinearOp:
    """A linear operator that is diagonal on its basis.

    ``element_inverse(k)`` gives the factor ``f`` with ``L[f phi_k] = phi_k``,
    or ``None`` when ``phi_k`` lies in the kernel (resonant index).
    """

    name: str
    apply: Callable[[TruncatedSeries], TruncatedSeries]
    element_inverse: Callable[[int, bool], Number | None]
    homogeneous_modes: tuple[HomogeneousMode, ...]

    def invert(self, rhs: TruncatedSeries, tol: float = 0.0) -> TruncatedSeries:
        """Particular solution of ``L[u] = rhs`` inside the basis of ``rhs``."""
        if not tol and not rhs.exact:
            tol = 1e-14 * max((abs(c) for c in rhs.coeffs), default=0.0)
        out = []
        for k, c in enumerate(rhs.coeffs):
            factor = self.element_inverse(k, rhs.exact)
            if factor is None:
                if abs(c) > tol:
                    raise ResonantForcing(f"{self.name}: forcing {c} on resonant index {k}")
                out.append(c * 0)
            else:
                out.append(factor * c)
        return TruncatedSeries(rhs.basis, out, rhs.exact)


def _exp_second_order_inverse(k: int, exact: bool):
    denom = k * k - 1
    if denom == 0:
        return None
    return Fraction(1, denom) if exact else 1.0 / denom


def exp_decay_operator(budget: int, exact: bool = True) -> AuxLinearOp:
    """``L[u] = u'' - u`` on ``{exp(-n t)}``; kernel ``exp(-t)`` and ``exp(t)``."""
    one = Fraction(1) if exact else 1.0
    decaying = exp_decay({1: one}, budget, exact)
    growing = TruncatedSeries.from_terms(EXP_GROWTH, {1: one}, 1, exact)
    return AuxLinearOp(
        name="u'' - u",
        apply=lambda u: u.differentiate().differentiate() - u,
        element_inverse=_exp_second_order_inverse,
        homogeneous_modes=(HomogeneousMode(decaying, True), HomogeneousMode(growing, False)),
    )


@dataclass(frozen=True)
class NonlinearOde:
    """``N[u] = linear(u) + sum_p c_p u**p`` with series-valued linear part."""

    name: str
    linear: Callable[[TruncatedSeries], TruncatedSeries]
    monomials: dict[int, Number]

    @property
    def polynomial_degree(self) -> int:
        return max(self.monomials, default=1)

    def residual(self, u: TruncatedSeries) -> TruncatedSeries:
        out = self.linear(u)
        for p, c in sorted(self.monomials.items()):
            out = out + _power(u, p).scale(c)
        return out


def _power(u: TruncatedSeries, p: int) -> TruncatedSeries:
    out = u
    for _ in range(p - 1):
        out = out.mul(u)
    return out


def problem_a_ode() -> NonlinearOde:
    """``u'' + 2u^3 - u``."""
    return NonlinearOde(
        name="u'' + 2u^3 - u",
        linear=lambda u: u.differentiate().differentiate() - u,
        monomials={3: 2},
    )


@dataclass(frozen=True)
class HamConfig:
    h: Number
    max_order: int
    bc_point: Number = 0
    bc_value: Number = 1

    def __post_init__(self):
        if self.max_order < 0:
            raise ValueError("max_order must be >= 0")
        if self.h == 0:
            raise ValueError("h must be nonzero")

    @property
    def budget(self) -> int:
        return 2 * self.max_order + 3


@dataclass(frozen=True)
class DeformationSolution:
    terms: tuple[TruncatedSeries, ...]
    h: Number

    @property
    def order(self) -> int:
        return len(self.terms) - 1

    @property
    def partial_sums(self) -> list[TruncatedSeries]:
        sums = [self.terms[0]]
        for u in self.terms[1:]:
            sums.append(sums[-1] + u)
        return sums

    @property
    def solution(self) -> TruncatedSeries:
        return self.partial_sums[-1]

    def __call__(self, t: Number):
        return self.solution.evaluate(t)

    def nu(self) -> list:
        return nu_coefficients(self)

    def to_json(self) -> dict:
        h = self.h
        if isinstance(h, Fraction):
            h = float(h) if h.denominator != 1 else int(h)
        nu = [f"{c.numerator}/{c.denominator}" if isinstance(c, Fraction) else c for c in self.nu()]
        return {"h": h, "terms": [u.to_json() for u in self.terms], "nu": nu}


def chi(m: int) -> int:
    return 0 if m <= 1 else 1


def _as_mode_scalar(x: Number, exact: bool):
    if exact:
        if isinstance(x, float):
            # decimal reading, so that h=-0.05 means -1/20
            return Fraction(repr(x))
        return Fraction(x)
    return float(x)


def homotopy_residual(
    u: TruncatedSeries, q: Number, h: Number, L: AuxLinearOp, N: NonlinearOde
) -> TruncatedSeries:
    """``(1 - q) L[u] - h q N[u]``."""
    if not 0 <= q <= 1:
        raise ValueError("embedding parameter q must lie in [0, 1]")
    q = _as_mode_scalar(q, u.exact)
    h = _as_mode_scalar(h, u.exact)
    return L.apply(u).scale(1 - q) - N.residual(u).scale(h * q)


class _QPowers:
    """Coefficients of ``phi(q)**p`` for ``phi = sum U_k q**k``, built incrementally."""

    def __init__(self, degree: int, budget: int):
        self.degree = degree
        self.budget = budget
        self.terms: list[TruncatedSeries] = []
        # powers[p][k] = [q^k] phi^p, for p = 2..degree
        self.powers: dict[int, list[TruncatedSeries]] = {p: [] for p in range(2, degree + 1)}

    def push(self, u: TruncatedSeries):
        self.terms.append(u)
        k = len(self.terms) - 1
        prev = self.terms
        for p in range(2, self.degree + 1):
            acc = None
            for i in range(k + 1):
                term = prev[i].mul(self.terms[k - i], order=self.budget)
                acc = term if acc is None else acc + term
            self.powers[p].append(acc)
            prev = self.powers[p]

    def coefficient(self, p: int, k: int) -> TruncatedSeries:
        if p == 1:
            return self.terms[k]
        return self.powers[p][k]


def _rm_from_cache(cache: _QPowers, m: int, N: NonlinearOde) -> TruncatedSeries:
    out = N.linear(cache.terms[m - 1])
    for p, c in sorted(N.monomials.items()):
        out = out + cache.coefficient(p, m - 1).scale(c)
    return out


def rm_term(terms: Sequence[TruncatedSeries], m: int, N: NonlinearOde, budget: int | None = None) -> TruncatedSeries:
    """Forcing ``R_m`` of the order-``m`` deformation equation.

    For ``u'' + 2u^3 - u`` this is
    ``U''_{m-1} - U_{m-1} + 2 sum_{i+j+k=m-1} U_i U_j U_k``.
    """
    if m < 1:
        raise ValueError("R_m is defined for m >= 1")
    if len(terms) < m:
        raise ValueError(f"R_{m} needs U_0..U_{m-1}, got {len(terms)} terms")
    if budget is None:
        budget = max(u.order for u in terms[:m])
    cache = _QPowers(N.polynomial_degree, budget)
    for u in terms[:m]:
        cache.push(u.pad(budget) if u.basis.is_exponential and u.order < budget else u)
    return _rm_from_cache(cache, m, N)


def solve_deformation_step(
    terms: Sequence[TruncatedSeries],
    m: int,
    h: Number,
    L: AuxLinearOp,
    N: NonlinearOde | None,
    cfg: HamConfig,
    rm: TruncatedSeries | None = None,
) -> TruncatedSeries:
    """Solve ``L[U_m - chi_m U_{m-1}] = h R_m`` and restore ``U_m(bc_point) = 0``.

    ``rm`` may be passed when the forcing is already known; otherwise it is
    computed from ``terms`` with ``N``.
    """
    if rm is None:
        rm = rm_term(terms, m, N)
    prev = terms[m - 1]
    h = _as_mode_scalar(h, rm.exact)
    particular = L.invert(rm.scale(h))
    if chi(m):
        particular = particular + prev
    residual_bc = particular.evaluate(cfg.bc_point)
    if residual_bc == 0:
        return particular
    for mode in L.homogeneous_modes:
        if not mode.admissible or mode.series.basis != particular.basis:
            continue
        g0 = mode.series.evaluate(cfg.bc_point)
        if g0 == 0:
            continue
        return particular - mode.series.scale(residual_bc / g0)
    raise UnboundedMode(
        f"{L.name}: U_{m}({cfg.bc_point}) = {residual_bc} needs an inadmissible kernel mode"
    )


def ham_solve(N: NonlinearOde, L: AuxLinearOp, U0: TruncatedSeries, cfg: HamConfig) -> DeformationSolution:
    """Terms ``U_0 .. U_M`` of the HAM series for one value of ``h``."""
    budget = cfg.budget if U0.basis.is_exponential else U0.order
    if U0.basis.is_exponential:
        if U0.order > budget:
            U0 = U0.truncate(budget)
        U0 = U0.pad(budget)
    if U0.evaluate(cfg.bc_point) != cfg.bc_value:
        raise ValueError(f"U0({cfg.bc_point}) = {U0.evaluate(cfg.bc_point)} != {cfg.bc_value}")
    cache = _QPowers(N.polynomial_degree, budget)
    cache.push(U0)
    for m in range(1, cfg.max_order + 1):
        rm = _rm_from_cache(cache, m, N)
        u_m = solve_deformation_step(cache.terms, m, cfg.h, L, N, cfg, rm=rm)
        cache.push(u_m)
    return DeformationSolution(tuple(cache.terms), cfg.h)


def nu_coefficients(sol: DeformationSolution) -> list:
    """Per-index totals ``nu_n = sum_m [exp(-n t)] U_m``."""
    if sol.terms[0].basis != EXP_DECAY:
        raise BasisMismatch("nu coefficients are defined on the exp(-n t) basis")
    return list(sol.solution.coeffs)


def problem_a_initial(budget: int, exact: bool = True) -> TruncatedSeries:
    """``U_0 = exp(-t)``."""
    return exp_decay({1: Fraction(1) if exact else 1.0}, budget, exact)


def solve_problem_a(h: Number = -1, max_order: int = 10, exact: bool = True) -> DeformationSolution:
    cfg = HamConfig(h=h, max_order=max_order)
    return ham_solve(
        problem_a_ode(),
        exp_decay_operator(cfg.budget, exact),
        problem_a_initial(cfg.budget, exact),
        cfg,
    )
