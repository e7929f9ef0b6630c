"""The two boundary-value problems, their exact solutions, residuals and OHAM."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .ham import (
    AuxLinearOp,
    HamError,
    NonlinearOde,
    exp_decay_operator,
    ham_solve,
    HamConfig,
    problem_a_initial,
    problem_a_ode,
)
from .series import TruncatedSeries

log = logging.getLogger(__name__)

RealFn = Callable[[float], float]

DEFAULT_STEP = 1e-4


class DomainError(ValueError):
    pass


def sech_exact(t: float) -> float:
    x = math.exp(-abs(t))
    return 2.0 * x / (1.0 + x * x)


def problem_b_exact(t: float) -> float:
    """``exp(-1/t)`` for ``t > 0``, else 0."""
    if t <= 0:
        return 0.0
    return math.exp(-1.0 / t)


def _derivatives(u: RealFn, t: float, step: float) -> tuple[float, float, float]:
    um, u0, up = u(t - step), u(t), u(t + step)
    return u0, (up - um) / (2 * step), (up - 2 * u0 + um) / (step * step)


def residual_a(u: RealFn, t: float, step: float = DEFAULT_STEP) -> float:
    """``u'' + 2u^3 - u`` at ``t`` with central differences."""
    if step <= 0:
        raise ValueError("step must be positive")
    v, _, d2 = _derivatives(u, t, step)
    return d2 + 2 * v**3 - v


def residual_a_series(u: TruncatedSeries, t: float) -> float:
    """Same residual with exact series differentiation."""
    v = float(u.evaluate(t))
    d2 = float(u.differentiate().differentiate().evaluate(t))
    return d2 + 2 * v**3 - v


def residual_b(u: RealFn, t: float, step: float = DEFAULT_STEP) -> float:
    """``u u'' - u'^2 + 2 t^-3 u^2`` at ``t`` with central differences."""
    if t == 0:
        raise DomainError("the coefficient t^-3 is singular at t = 0")
    if step <= 0:
        raise ValueError("step must be positive")
    v, d1, d2 = _derivatives(u, t, step)
    return v * d2 - d1 * d1 + 2 * v * v / t**3


def l2_operator_on_kernel(t: float, c1: float = 1.0) -> float:
    """``L2[u] = u'' - t^-2 u' + 2 t^-3 u`` for ``u = c1 exp(-1/t)``, closed-form derivatives."""
    e = c1 * math.exp(-1.0 / t)
    u1 = e / t**2
    u2 = (t**-4 - 2 * t**-3) * e
    return u2 - u1 / t**2 + 2 * e / t**3


def verify_l2_kernel(grid: Sequence[float], c1: float = 1.0) -> float:
    """Largest ``|L2[c1 exp(-1/t)]|`` over ``grid`` (all points positive)."""
    if any(t <= 0 for t in grid):
        raise DomainError("L2 kernel check needs t > 0")
    return max(abs(l2_operator_on_kernel(t, c1)) for t in grid)


def global_exp_representation(t: float, m: int) -> float:
    """``sum_{k<=m} 2 (-1)^k exp(-(2k+1)|t|)``, with value 1 at ``t = 0``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if t == 0:
        return 1.0
    x = math.exp(-abs(t))
    x2 = x * x
    terms = []
    term = 2.0 * x
    for k in range(m + 1):
        terms.append(term if k % 2 == 0 else -term)
        term *= x2
    return math.fsum(terms)


@dataclass(frozen=True)
class BoundaryCondition:
    point: float
    value: float

    def holds(self, u: RealFn, tol: float = 1e-12) -> bool:
        if math.isinf(self.point):
            far = math.copysign(1e12, self.point)
            return abs(u(far) - self.value) <= 1e-8
        return abs(u(self.point) - self.value) <= tol


@dataclass(frozen=True)
class ProblemDef:
    name: str
    residual: Callable[[RealFn, float, float], float]
    exact: RealFn
    conditions: tuple[BoundaryCondition, ...]
    ode: NonlinearOde | None = None
    operator: Callable[[int, bool], AuxLinearOp] | None = None
    initial: Callable[[int, bool], TruncatedSeries] | None = None
    series_residual: Callable[[TruncatedSeries, float], float] | None = None

    def solve(self, h: float, order: int, exact: bool = False):
        if self.ode is None or self.operator is None or self.initial is None:
            raise NotImplementedError(f"{self.name}: no series HAM setup")
        cfg = HamConfig(h=h, max_order=order)
        return ham_solve(self.ode, self.operator(cfg.budget, exact), self.initial(cfg.budget, exact), cfg)


PROBLEM_A = ProblemDef(
    name="A: u'' + 2u^3 - u = 0",
    residual=residual_a,
    exact=sech_exact,
    conditions=(
        BoundaryCondition(0.0, 1.0),
        BoundaryCondition(math.inf, 0.0),
        BoundaryCondition(-math.inf, 0.0),
    ),
    ode=problem_a_ode(),
    operator=exp_decay_operator,
    initial=problem_a_initial,
    series_residual=residual_a_series,
)

# The zeroth-order HAM term with L2 already equals the exact solution.
PROBLEM_B = ProblemDef(
    name="B: u u'' - u'^2 + 2 t^-3 u^2 = 0",
    residual=residual_b,
    exact=problem_b_exact,
    conditions=(BoundaryCondition(-math.inf, 0.0), BoundaryCondition(math.inf, 1.0)),
)


def problem_b_ham_zeroth_order(t: float) -> float:
    """``U_0`` from the L2 kernel: ``C1 = 1, C2 = 0`` for ``t > 0`` and 0 otherwise."""
    return problem_b_exact(t)


def grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid built from integer multiples of ``step`` (no drift)."""
    count = int(round((stop - start) / step))
    return [round(start + i * step, 12) for i in range(count + 1)]


DEFAULT_T_GRID = tuple(grid(0.5, 5.0, 0.25))
DEFAULT_H_GRID = tuple(grid(-2.0, -0.1, 0.05))


@dataclass
class ResidualReport:
    grid: list[float]
    residuals: list[float]
    h: float
    order: int

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("residual grid must be strictly increasing")
        if len(self.grid) != len(self.residuals):
            raise ValueError("grid and residual lengths differ")

    @property
    def l2_norm(self) -> float:
        """Root-mean-square of the pointwise residuals."""
        return math.sqrt(math.fsum(r * r for r in self.residuals) / len(self.residuals))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["h", "M", "t", "residual"])
        for t, r in zip(self.grid, self.residuals):
            w.writerow([f"{self.h:.12g}", self.order, f"{t:.12g}", f"{r:.12g}"])
        w.writerow([f"{self.h:.12g}", self.order, "L2", f"{self.l2_norm:.12g}"])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "h": self.h,
            "M": self.order,
            "grid": list(self.grid),
            "residuals": list(self.residuals),
            "l2_norm": self.l2_norm,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def residual_report(problem: ProblemDef, h: float, order: int, t_grid: Sequence[float]) -> ResidualReport:
    sol = problem.solve(h, order, exact=False)
    s = sol.solution
    if problem.series_residual is not None:
        res = [problem.series_residual(s, t) for t in t_grid]
    else:
        res = [problem.residual(s.evaluate, t, DEFAULT_STEP) for t in t_grid]
    return ResidualReport(list(t_grid), res, float(h), order)


@dataclass
class OhamResult:
    h_star: float
    report: ResidualReport
    sweep: dict[float, float] = field(default_factory=dict)
    failed: dict[float, str] = field(default_factory=dict)


def optimal_h(
    problem: ProblemDef,
    order: int,
    h_grid: Sequence[float] = DEFAULT_H_GRID,
    t_grid: Sequence[float] = DEFAULT_T_GRID,
) -> OhamResult:
    """Grid argmin of the residual norm over ``h``.

    Ties go to the ``h`` closest to -1, then to the smallest ``|h|``. An ``h``
    whose run fails is logged and skipped.
    """
    if not h_grid:
        raise ValueError("h grid is empty")
    if any(h == 0 for h in h_grid):
        raise ValueError("h grid must exclude 0")
    reports: dict[float, ResidualReport] = {}
    failed: dict[float, str] = {}
    for h in h_grid:
        try:
            rep = residual_report(problem, h, order, t_grid)
        except (HamError, ArithmeticError) as exc:
            log.warning("h=%g skipped: %s", h, exc)
            failed[h] = str(exc)
            continue
        if not math.isfinite(rep.l2_norm):
            log.warning("h=%g skipped: non-finite residual norm", h)
            failed[h] = "non-finite residual norm"
            continue
        reports[h] = rep
    if not reports:
        raise HamError("every h in the grid failed")
    h_star = min(reports, key=lambda h: (reports[h].l2_norm, abs(h + 1), abs(h)))
    return OhamResult(h_star, reports[h_star], {h: r.l2_norm for h, r in reports.items()}, failed)
