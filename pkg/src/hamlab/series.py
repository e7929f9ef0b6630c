"""Truncated series over power and exponential base functions.

A :class:`TruncatedSeries` holds coefficients ``c_0 .. c_N`` over one of three
function families:

* ``power``      -- ``(t - t0)**n``
* ``expdecay``   -- ``exp(-n t)``
* ``expgrowth``  -- ``exp(+n t)``

Coefficients are either all exact (:class:`fractions.Fraction`) or all
floating point. The mode is fixed when the series is built.

Power series are genuine truncations, so sums and products keep the smaller
order. Exponential series are finite exponential sums with a truncation
*budget*: sums zero-pad to the larger budget and products drop indices above
the budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

Number = Union[int, Fraction, float]

POWER = "power"
EXPDECAY = "expdecay"
EXPGROWTH = "expgrowth"


class SeriesError(ArithmeticError):
    pass


class BasisMismatch(SeriesError):
    pass


class OrderOutOfRange(SeriesError, ValueError):
    pass


@dataclass(frozen=True)
class Basis:
    """Identifies the function family a series is expanded in."""

    kind: str
    center: Number | None = None

    def __post_init__(self):
        if self.kind not in (POWER, EXPDECAY, EXPGROWTH):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.kind == POWER:
            if self.center is None or not math.isfinite(self.center):
                raise ValueError("power basis needs a finite center")
        elif self.center is not None:
            raise ValueError(f"{self.kind} basis takes no center")

    @classmethod
    def power(cls, center: Number = 0) -> Basis:
        return cls(POWER, center)

    @property
    def is_exponential(self) -> bool:
        return self.kind != POWER

    @property
    def rate(self) -> int:
        """Sign of the exponent: -1 for decay, +1 for growth."""
        if self.kind == EXPDECAY:
            return -1
        if self.kind == EXPGROWTH:
            return 1
        raise ValueError("power basis has no exponential rate")

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == POWER:
            out["center"] = _coeff_to_json(self.center)
        return out

    @classmethod
    def from_json(cls, data: dict) -> Basis:
        if data["kind"] == POWER:
            return cls(POWER, _coeff_from_json(data["center"]))
        return cls(data["kind"])


EXP_DECAY = Basis(EXPDECAY)
EXP_GROWTH = Basis(EXPGROWTH)


def _is_exact(x) -> bool:
    return isinstance(x, Rational)


def _coeff_to_json(c):
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    if isinstance(c, Rational):
        return f"{int(c)}/1"
    return float(c)


def _coeff_from_json(c):
    if isinstance(c, str):
        return Fraction(c)
    return float(c)


@dataclass(frozen=True)
class TruncatedSeries:
    """Immutable truncated series ``sum c_n * phi_n(t)`` for ``n <= order``."""

    basis: Basis
    coeffs: tuple
    exact: bool

    def __init__(self, basis: Basis, coeffs: Iterable[Number], exact: bool | None = None):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("a series needs at least the constant coefficient")
        if exact is None:
            exact = all(_is_exact(c) for c in coeffs)
        if exact:
            if not all(_is_exact(c) for c in coeffs):
                raise TypeError("exact series requires int or Fraction coefficients")
            coeffs = [Fraction(c) for c in coeffs]
        else:
            coeffs = [float(c) for c in coeffs]
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "exact", bool(exact))

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, basis: Basis, order: int, exact: bool = True) -> TruncatedSeries:
        zero = Fraction(0) if exact else 0.0
        return cls(basis, [zero] * (order + 1), exact)

    @classmethod
    def from_terms(
        cls, basis: Basis, terms: dict[int, Number], order: int, exact: bool | None = None
    ) -> TruncatedSeries:
        """Build from a sparse ``{index: coefficient}`` mapping."""
        if terms and max(terms) > order:
            raise OrderOutOfRange(f"index {max(terms)} exceeds order {order}")
        if exact is None:
            exact = all(_is_exact(c) for c in terms.values())
        coeffs = [Fraction(0) if exact else 0.0] * (order + 1)
        for k, c in terms.items():
            coeffs[k] = c
        return cls(basis, coeffs, exact)

    # -- basic properties -------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def support(self) -> list[int]:
        return [k for k, c in enumerate(self.coeffs) if c != 0]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_float(self) -> TruncatedSeries:
        if not self.exact:
            return self
        return TruncatedSeries(self.basis, self.coeffs, exact=False)

    # -- arithmetic -------------------------------------------------------

    def _check_compatible(self, other: TruncatedSeries):
        if not isinstance(other, TruncatedSeries):
            raise TypeError(f"expected TruncatedSeries, got {type(other).__name__}")
        if self.basis != other.basis:
            raise BasisMismatch(f"{self.basis} vs {other.basis}")

    def _coerce_pair(self, other: TruncatedSeries):
        if self.exact and other.exact:
            return self, other, True
        return self.to_float(), other.to_float(), False

    def add(self, other: TruncatedSeries) -> TruncatedSeries:
        self._check_compatible(other)
        a, b, exact = self._coerce_pair(other)
        zero = Fraction(0) if exact else 0.0
        if self.basis.is_exponential:
            n = max(a.order, b.order)
            ca = a.coeffs + (zero,) * (n - a.order)
            cb = b.coeffs + (zero,) * (n - b.order)
        else:
            n = min(a.order, b.order)
            ca, cb = a.coeffs[: n + 1], b.coeffs[: n + 1]
        return TruncatedSeries(self.basis, [x + y for x, y in zip(ca, cb)], exact)

    def scale(self, factor: Number) -> TruncatedSeries:
        if not self.exact and _is_exact(factor):
            factor = float(factor)
        elif self.exact and not _is_exact(factor):
            return self.to_float().scale(factor)
        return TruncatedSeries(self.basis, [factor * c for c in self.coeffs], self.exact)

    def mul(self, other: TruncatedSeries, order: int | None = None) -> TruncatedSeries:
        """Product in the shared basis.

        Power bases use the Cauchy product truncated at the smaller order.
        Exponential bases convolve indices (``e^{-nt} e^{-mt} = e^{-(n+m)t}``)
        and keep indices up to ``order`` (default: the larger budget).
        """
        self._check_compatible(other)
        a, b, exact = self._coerce_pair(other)
        if order is None:
            if self.basis.is_exponential:
                order = max(a.order, b.order)
            else:
                order = min(a.order, b.order)
        elif not self.basis.is_exponential and order > min(a.order, b.order):
            raise OrderOutOfRange("power-series product cannot exceed the smaller order")
        if exact:
            out = [Fraction(0)] * (order + 1)
            for i, x in enumerate(a.coeffs[: order + 1]):
                if not x:
                    continue
                for j, y in enumerate(b.coeffs[: order + 1 - i]):
                    if y:
                        out[i + j] += x * y
        else:
            full = np.convolve(a.coeffs[: order + 1], b.coeffs[: order + 1])
            out = list(full[: order + 1])
            out += [0.0] * (order + 1 - len(out))
        return TruncatedSeries(self.basis, out, exact)

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.add(other)
        return NotImplemented

    def __neg__(self):
        return TruncatedSeries(self.basis, [-c for c in self.coeffs], self.exact)

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.add(-other)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.mul(other)
        if isinstance(other, (int, float, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    # -- calculus and evaluation ------------------------------------------

    def differentiate(self) -> TruncatedSeries:
        if self.basis.is_exponential:
            rate = self.basis.rate
            return TruncatedSeries(
                self.basis, [rate * n * c for n, c in enumerate(self.coeffs)], self.exact
            )
        if self.order < 1:
            raise OrderOutOfRange("cannot differentiate an order-0 power series")
        return TruncatedSeries(
            self.basis, [n * c for n, c in enumerate(self.coeffs) if n > 0], self.exact
        )

    def evaluate(self, t: Number):
        """Value of the partial sum at ``t``.

        No validity guard: outside the radius of a power series the raw
        (possibly huge) partial sum is returned. Exact series return a
        Fraction when the value is rational (power basis at a rational
        ``t``, exponential basis at ``t == 0``).
        """
        if self.basis.kind == POWER:
            exact = self.exact and _is_exact(t) and _is_exact(self.basis.center)
            x = (Fraction(t) - Fraction(self.basis.center)) if exact else float(t) - float(self.basis.center)
            coeffs = self.coeffs if exact else [float(c) for c in self.coeffs]
            acc = coeffs[-1]
            for c in reversed(coeffs[:-1]):
                acc = acc * x + c
            return acc
        if t == 0:
            return sum(self.coeffs, Fraction(0)) if self.exact else math.fsum(self.coeffs)
        t = float(t)
        rate = self.basis.rate
        return math.fsum(float(c) * math.exp(rate * n * t) for n, c in enumerate(self.coeffs) if c)

    def __call__(self, t: Number):
        return self.evaluate(t)

    def truncate(self, new_order: int) -> TruncatedSeries:
        if not 0 <= new_order <= self.order:
            raise OrderOutOfRange(f"new order {new_order} outside [0, {self.order}]")
        return TruncatedSeries(self.basis, self.coeffs[: new_order + 1], self.exact)

    def pad(self, new_order: int) -> TruncatedSeries:
        """Zero-extend an exponential series to a larger budget."""
        if not self.basis.is_exponential:
            raise BasisMismatch("only exponential series can be zero-padded")
        if new_order < self.order:
            raise OrderOutOfRange("pad cannot shrink a series; use truncate")
        zero = Fraction(0) if self.exact else 0.0
        return TruncatedSeries(self.basis, self.coeffs + (zero,) * (new_order - self.order), self.exact)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {"basis": self.basis.to_json(), "coeffs": [_coeff_to_json(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> TruncatedSeries:
        coeffs = [_coeff_from_json(c) for c in data["coeffs"]]
        return cls(Basis.from_json(data["basis"]), coeffs)


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a.add(b)


def mul(a: TruncatedSeries, b: TruncatedSeries, order: int | None = None) -> TruncatedSeries:
    return a.mul(b, order)


def differentiate(a: TruncatedSeries) -> TruncatedSeries:
    return a.differentiate()


def evaluate(a: TruncatedSeries, t: Number):
    return a.evaluate(t)


def truncate(a: TruncatedSeries, new_order: int) -> TruncatedSeries:
    return a.truncate(new_order)


def exp_decay(terms: dict[int, Number], order: int, exact: bool | None = None) -> TruncatedSeries:
    """Shorthand for an ``exp(-n t)`` series from sparse terms."""
    return TruncatedSeries.from_terms(EXP_DECAY, terms, order, exact)


def power_series(coeffs: Sequence[Number], center: Number = 0) -> TruncatedSeries:
    return TruncatedSeries(Basis.power(center), coeffs)
