"""Taylor expansions of ``u'' = u - 2u^3`` and radius-of-convergence estimates."""

from __future__ import annotations

import csv
import io
import math
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from numbers import Rational
from typing import Sequence

import numpy as np

from .series import Basis, Number, TruncatedSeries

DEFAULT_EXACT_LIMIT = 40
EXACT_LIMIT_ENV = "HAMLAB_EXACT_MODE_LIMIT"

ROOT_TEST = "root"
RATIO_TEST = "ratio"
DOMB_SYKES = "domb-sykes"
METHODS = (ROOT_TEST, RATIO_TEST, DOMB_SYKES)


class InsufficientTail(ValueError):
    pass


def exact_mode_limit() -> int:
    """Largest order computed in rational arithmetic (env override allowed)."""
    raw = os.environ.get(EXACT_LIMIT_ENV)
    if raw is None:
        return DEFAULT_EXACT_LIMIT
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{EXACT_LIMIT_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class TaylorExpansion:
    center: Number
    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Rational) for c in self.coeffs)

    def as_series(self) -> TruncatedSeries:
        return TruncatedSeries(Basis.power(self.center), self.coeffs)

    def __call__(self, t: Number):
        return self.as_series().evaluate(t)

    def to_float(self) -> TaylorExpansion:
        return TaylorExpansion(float(self.center), tuple(float(c) for c in self.coeffs))


def taylor_from_ode(u0: Number, up0: Number, t0: Number, n: int, exact_limit: int | None = None) -> TaylorExpansion:
    """Coefficients ``a_0..a_n`` of the solution of ``u'' = u - 2u^3`` about ``t0``.

    Uses ``(k+2)(k+1) a_{k+2} = a_k - 2 (a*a*a)_k``. Rational inputs with
    ``n <= exact_limit`` give exact coefficients; otherwise floats.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if exact_limit is None:
        exact_limit = exact_mode_limit()
    exact = n <= exact_limit and isinstance(u0, Rational) and isinstance(up0, Rational)
    conv = Fraction if exact else float
    a = [conv(u0), conv(up0)]
    sq: list = []
    cube: list = []
    for k in range(n - 1):
        sq.append(sum((a[i] * a[k - i] for i in range(k + 1)), conv(0)))
        cube.append(sum((sq[i] * a[k - i] for i in range(k + 1)), conv(0)))
        a.append((a[k] - 2 * cube[k]) / ((k + 2) * (k + 1)))
    return TaylorExpansion(t0, tuple(a))


def sech_taylor_reference(n: int) -> TaylorExpansion:
    """Exact Taylor coefficients of sech at 0 from ``1 / cosh`` series division."""
    if n < 0:
        raise ValueError("need n >= 0")
    cosh = [Fraction(1, math.factorial(k)) if k % 2 == 0 else Fraction(0) for k in range(n + 1)]
    out = [Fraction(1)]
    for k in range(1, n + 1):
        out.append(-sum((cosh[j] * out[k - j] for j in range(1, k + 1)), Fraction(0)))
    return TaylorExpansion(0, tuple(out))


def recenter(p: TaylorExpansion, new_center: Number, trust_radius: float | None = None) -> TaylorExpansion:
    """Re-expand the degree-N partial sum of ``p`` about ``new_center``.

    ``b_j = sum_{k>=j} C(k, j) a_k s^(k-j)`` with ``s = new_center - center``.
    Exact whenever the coefficients and the shift are rational.
    """
    if trust_radius is not None and abs(new_center - p.center) >= trust_radius:
        warnings.warn(
            f"shift {abs(new_center - p.center):g} is outside the trust radius {trust_radius:g}",
            stacklevel=2,
        )
    exact = p.exact and isinstance(new_center, Rational) and isinstance(p.center, Rational)
    if exact:
        s = Fraction(new_center) - Fraction(p.center)
        a = list(p.coeffs)
    else:
        s = float(new_center) - float(p.center)
        a = [float(c) for c in p.coeffs]
    if s == 0:
        return TaylorExpansion(new_center, tuple(a))
    n = len(a) - 1
    powers = [s**0]
    for _ in range(n):
        powers.append(powers[-1] * s)
    b = []
    for j in range(n + 1):
        terms = [comb(k, j) * a[k] * powers[k - j] for k in range(j, n + 1)]
        b.append(sum(terms, Fraction(0)) if exact else math.fsum(terms))
    return TaylorExpansion(new_center, tuple(b))


def predicted_radius(t0: float) -> float:
    """Distance from ``t0`` to the nearest pole ``+-i pi/2`` of sech."""
    return math.hypot(t0, math.pi / 2)


@dataclass(frozen=True)
class RadiusEstimate:
    value: float
    method: str
    tail_window: int
    diagnostics: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"radius must be positive, got {self.value}")
        if self.tail_window < 8:
            raise ValueError("tail window must hold at least 8 coefficients")


def _nonzero_tail(coeffs: Sequence[Number], tail_window: int) -> tuple[np.ndarray, np.ndarray]:
    idx = [k for k, c in enumerate(coeffs) if k > 0 and c != 0 and math.isfinite(float(c))]
    if len(idx) < 16:
        raise InsufficientTail(f"need >= 16 nonzero coefficients, have {len(idx)}")
    idx = idx[-tail_window:]
    n = np.array(idx, dtype=float)
    # log of |a_n| via Fraction-safe path: rational tails can underflow float
    loga = np.array([_log_abs(coeffs[k]) for k in idx])
    return n, loga


def _log_abs(c) -> float:
    if isinstance(c, Fraction):
        return math.log(abs(c.numerator)) - math.log(c.denominator)
    return math.log(abs(float(c)))


def _upper_hull(n: np.ndarray, y: np.ndarray) -> list[int]:
    hull: list[int] = []
    for i in range(len(n)):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (n[i1] - n[i0]) * (y[i] - y[i0]) - (y[i1] - y[i0]) * (n[i] - n[i0])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def estimate_radius(coeffs: Sequence[Number], method: str = ROOT_TEST, tail_window: int = 32) -> RadiusEstimate:
    """Radius of convergence of ``sum a_n x^n`` from the trailing coefficients.

    Zero coefficients are dropped first (parity compression), keeping the
    original indices so the radius is in ``x`` and not in ``x**2``.

    * ``root``: per-n ``|a_n|^(-1/n)`` as diagnostics; the estimate is the
      least-squares slope of ``log|a_n|`` against ``n`` on the upper hull of
      the tail, which removes the ``log C / n`` bias of the raw root test and
      skips the dips caused by complex-conjugate singularities.
    * ``ratio``: geometric mean of consecutive nonzero ratios.
    * ``domb-sykes``: ``|a_n / a_prev|^(1/gap)`` extrapolated linearly in ``1/n``.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if tail_window < 8:
        raise ValueError("tail window must be >= 8")
    n, loga = _nonzero_tail(coeffs, tail_window)

    if method == ROOT_TEST:
        diag = tuple(np.exp(-loga / n))
        hull = _upper_hull(n, loga)
        if len(hull) >= 2:
            slope = np.polyfit(n[hull], loga[hull], 1)[0]
        else:
            slope = (loga[-1] - loga[0]) / (n[-1] - n[0])
        value = math.exp(-slope)
    elif method == RATIO_TEST:
        per = -np.diff(loga) / np.diff(n)
        diag = tuple(np.exp(per))
        value = math.exp(float(np.mean(per)))
    else:
        inv_r = np.exp(np.diff(loga) / np.diff(n))
        x = 1.0 / n[1:]
        diag = tuple(1.0 / inv_r)
        intercept = np.polyfit(x, inv_r, 1)[1]
        value = 1.0 / intercept if intercept > 0 else float("inf")
    return RadiusEstimate(float(value), method, len(n), diag)


@dataclass(frozen=True)
class RadiusRow:
    t0: float
    method: str
    n: int
    estimate: float
    predicted: float

    @property
    def relative_error(self) -> float:
        return abs(self.estimate - self.predicted) / self.predicted


def sech_expansion(t0: float, n: int, exact_limit: int | None = None) -> TaylorExpansion:
    """Taylor expansion of sech about ``t0`` generated from the ODE."""
    if t0 == 0:
        return taylor_from_ode(1, 0, 0, n, exact_limit)
    sech = 1.0 / math.cosh(t0)
    return taylor_from_ode(sech, -sech * math.tanh(t0), t0, n, exact_limit)


def radius_table(t0s: Sequence[float] = (0, 0.5, 1, 2, 3), n: int = 120, method: str = ROOT_TEST) -> list[RadiusRow]:
    rows = []
    for t0 in t0s:
        est = estimate_radius(sech_expansion(t0, n).coeffs, method)
        rows.append(RadiusRow(float(t0), method, n, est.value, predicted_radius(t0)))
    return rows


def radius_rows_to_csv(rows: Sequence[RadiusRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t0", "method", "N", "estimate", "predicted", "relative_error"])
    for r in rows:
        writer.writerow([f"{r.t0:.12g}", r.method, r.n, f"{r.estimate:.12g}", f"{r.predicted:.12g}", f"{r.relative_error:.12g}"])
    return buf.getvalue()
