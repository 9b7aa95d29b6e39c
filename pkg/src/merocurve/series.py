"""Truncated Puiseux series with exact coefficients.

A series stores its coefficients on the grid (1/ram)Z together with a
truncation order ``trunc``: every term with exponent below ``trunc`` is
known exactly, nothing is known at or above it.  ``trunc = INF`` marks an
exact Laurent (or Puiseux) polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .coeff import as_field, canon_key, fpow, inv, is_zero
from .errors import DivisionByZero, NotOnEdge, PrecisionExhausted

INF = math.inf

__all__ = [
    "INF",
    "EdgeTriple",
    "PuiseuxSeries",
    "edge_contains",
    "trunc_dagger",
    "trunc_dagger_star",
    "deform",
]


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _tq(x):
    return INF if x == INF else _q(x)


class PuiseuxSeries:
    __slots__ = ("ram", "coeffs", "trunc")

    def __init__(self, coeffs: Mapping[int, object] | None = None, ram: int = 1, trunc=INF):
        trunc = _tq(trunc)
        clean = {}
        for i, c in (coeffs or {}).items():
            if trunc != INF and Fraction(i, ram) >= trunc:
                continue
            c = as_field(c)
            if not is_zero(c):
                clean[i] = as_field(c)
        g = ram
        for i in clean:
            g = math.gcd(g, i)
            if g == 1:
                break
        if g > 1:
            clean = {i // g: c for i, c in clean.items()}
            ram //= g
        self.ram = ram
        self.coeffs = clean
        self.trunc = trunc

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_terms(cls, terms: Mapping | Iterable, trunc=INF) -> "PuiseuxSeries":
        items = terms.items() if isinstance(terms, Mapping) else terms
        items = [(_q(e), c) for e, c in items]
        ram = 1
        for e, _ in items:
            ram = math.lcm(ram, e.denominator)
        coeffs: dict[int, object] = {}
        for e, c in items:
            k = int(e * ram)
            coeffs[k] = coeffs.get(k, 0) + as_field(c)
        return cls(coeffs, ram, trunc)

    @classmethod
    def const(cls, c) -> "PuiseuxSeries":
        return cls({0: c})

    @classmethod
    def monomial(cls, c, e=0) -> "PuiseuxSeries":
        return cls.from_terms({_q(e): c})

    @classmethod
    def zero(cls, trunc=INF) -> "PuiseuxSeries":
        return cls({}, 1, trunc)

    # -- views ---------------------------------------------------------------
    def terms(self) -> list[tuple[Fraction, object]]:
        return [(Fraction(i, self.ram), self.coeffs[i]) for i in sorted(self.coeffs)]

    def support(self) -> list[Fraction]:
        return [Fraction(i, self.ram) for i in sorted(self.coeffs)]

    @property
    def is_exact(self) -> bool:
        return self.trunc == INF

    def is_known_zero(self) -> bool:
        return not self.coeffs and self.trunc == INF

    def ord_x(self):
        if self.coeffs:
            return Fraction(min(self.coeffs), self.ram)
        if self.trunc == INF:
            return INF
        raise PrecisionExhausted(f"order undetermined below {self.trunc}")

    def valuation_bound(self):
        """ord_x if known, else the truncation order (a lower bound)."""
        if self.coeffs:
            return Fraction(min(self.coeffs), self.ram)
        return self.trunc

    def lead(self):
        """(exponent, coefficient) of the initial term."""
        i = min(self.coeffs) if self.coeffs else None
        if i is None:
            self.ord_x()
            raise ZeroDivisionError("zero series has no initial term")
        return Fraction(i, self.ram), self.coeffs[i]

    def coeff_at(self, e):
        e = _q(e)
        if self.trunc != INF and e >= self.trunc:
            raise PrecisionExhausted(f"coefficient at {e} beyond truncation {self.trunc}")
        k = e * self.ram
        if k.denominator != 1:
            return Fraction(0)
        return self.coeffs.get(int(k), Fraction(0))

    def max_exponent(self):
        if not self.coeffs:
            return None
        return Fraction(max(self.coeffs), self.ram)

    # -- arithmetic ----------------------------------------------------------
    def _regrid(self, ram: int) -> dict[int, object]:
        f = ram // self.ram
        return {i * f: c for i, c in self.coeffs.items()}

    def __add__(self, other):
        other = _as_series(other)
        ram = math.lcm(self.ram, other.ram)
        a, b = self._regrid(ram), other._regrid(ram)
        for i, c in b.items():
            a[i] = a[i] + c if i in a else c
        return PuiseuxSeries(a, ram, min(self.trunc, other.trunc))

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries({i: -c for i, c in self.coeffs.items()}, self.ram, self.trunc)

    def __sub__(self, other):
        return self + (-_as_series(other))

    def __rsub__(self, other):
        return _as_series(other) - self

    def __mul__(self, other):
        if not isinstance(other, PuiseuxSeries):
            c = as_field(other)
            if is_zero(c):
                return PuiseuxSeries.zero()
            return PuiseuxSeries({i: v * c for i, v in self.coeffs.items()}, self.ram, self.trunc)
        if self.is_known_zero() or other.is_known_zero():
            return PuiseuxSeries.zero()
        ram = math.lcm(self.ram, other.ram)
        a, b = self._regrid(ram), other._regrid(ram)
        trunc = min(self.trunc + other.valuation_bound(), other.trunc + self.valuation_bound())
        lim = INF if trunc == INF else trunc * ram
        out: dict[int, object] = {}
        for i, x in a.items():
            for j, y in b.items():
                k = i + j
                if k >= lim:
                    continue
                out[k] = out[k] + x * y if k in out else x * y
        return PuiseuxSeries(out, ram, trunc)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("use inverse() for negative powers")
        r = PuiseuxSeries.const(1)
        for _ in range(e):
            r = r * self
        return r

    def inverse(self, budget=INF) -> "PuiseuxSeries":
        """Multiplicative inverse, truncated at ``budget`` when not a monomial."""
        if not self.coeffs:
            if self.trunc == INF:
                raise DivisionByZero("inverse of the zero series")
            raise PrecisionExhausted("inverse of a series with undetermined order")
        o, c0 = self.lead()
        ic = inv(c0)
        if len(self.coeffs) == 1 and self.trunc == INF:
            return PuiseuxSeries.from_terms({-o: ic})
        trunc = min(_tq(budget), self.trunc - 2 * o)
        # u = X^{-o} self / c0 = 1 + w ; 1/u = sum (-w)^k
        w = self.shift(-o) * ic - 1
        if trunc == INF:
            raise ValueError("inverse of a non-monomial exact series needs a finite budget")
        rel = trunc + o  # relative precision needed
        acc = PuiseuxSeries.const(1).truncate(rel)
        term = PuiseuxSeries.const(1).truncate(rel)
        mw = (-w).truncate(rel)
        if mw.coeffs:
            step = mw.ord_x()
            k = 0
            while True:
                term = (term * mw).truncate(rel)
                k += 1
                if not term.coeffs or step * k >= rel:
                    break
                acc = acc + term
        return (acc * ic).shift(-o).truncate(trunc)

    def shift(self, e) -> "PuiseuxSeries":
        """Multiply by X^e."""
        e = _q(e)
        ram = math.lcm(self.ram, e.denominator)
        s = int(e * ram)
        return PuiseuxSeries(
            {i + s: c for i, c in self._regrid(ram).items()},
            ram,
            INF if self.trunc == INF else self.trunc + e,
        )

    def truncate(self, t) -> "PuiseuxSeries":
        t = _tq(t)
        if t >= self.trunc:
            return self
        return PuiseuxSeries(self.coeffs, self.ram, t)

    def substitute(self, v) -> "PuiseuxSeries":
        """X -> X^v for a positive rational v."""
        v = _q(v)
        if v <= 0:
            raise ValueError("substitution exponent must be positive")
        ram = self.ram * v.denominator
        return PuiseuxSeries(
            {i * v.numerator: c for i, c in self.coeffs.items()},
            ram,
            INF if self.trunc == INF else self.trunc * v,
        )

    def rotate(self, zeta, order: int) -> "PuiseuxSeries":
        """X^(1/order) -> zeta X^(1/order); ``order`` must be a multiple of ram."""
        if order % self.ram:
            raise ValueError("rotation order must be a multiple of the ramification")
        f = order // self.ram
        out = {}
        for i, c in self.coeffs.items():
            out[i] = c * fpow(zeta, (i * f) % order)
        return PuiseuxSeries(out, self.ram, self.trunc)

    def map_coeffs(self, fn) -> "PuiseuxSeries":
        return PuiseuxSeries({i: fn(c) for i, c in self.coeffs.items()}, self.ram, self.trunc)

    def derivative(self) -> "PuiseuxSeries":
        out = {i - self.ram: c * Fraction(i, self.ram) for i, c in self.coeffs.items()}
        return PuiseuxSeries(out, self.ram, INF if self.trunc == INF else self.trunc - 1)

    # -- comparison ------------------------------------------------------------
    def agrees_with(self, other: "PuiseuxSeries") -> bool:
        """Equal on the common known range."""
        d = self - other
        return not d.coeffs

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            try:
                other = _as_series(other)
            except TypeError:
                return NotImplemented
        return self.trunc == other.trunc and not (self - other).coeffs

    def __hash__(self):
        return hash((self.ram, self.trunc, tuple(sorted(self.coeffs))))

    def sort_key(self):
        return tuple((Fraction(i, self.ram), canon_key(c)) for i, c in sorted(self.coeffs.items()))

    def __repr__(self):
        from .meropoly import format_series

        return f"PuiseuxSeries({format_series(self)})"


def _as_series(x) -> PuiseuxSeries:
    if isinstance(x, PuiseuxSeries):
        return x
    return PuiseuxSeries.const(as_field(x))


@dataclass(frozen=True)
class EdgeTriple:
    U: int
    V: int
    W: int

    def __post_init__(self):
        if self.U <= 0 or self.V <= 0:
            raise ValueError("edge triples need U > 0 and V > 0")

    @property
    def cut(self) -> Fraction:
        """WU/V, the exponent of z at which the deformation starts."""
        return Fraction(self.W * self.U, self.V)


def edge_contains(z: PuiseuxSeries, t: EdgeTriple) -> bool:
    cut = t.cut
    if z.trunc != INF and z.trunc < cut:
        raise PrecisionExhausted("series known only below the edge cut")
    for e in z.support():
        if e >= cut:
            break
        if (e * t.V / t.U).denominator != 1:
            return False
    return True


def trunc_dagger(z: PuiseuxSeries, t: EdgeTriple) -> PuiseuxSeries:
    if not edge_contains(z, t):
        raise NotOnEdge(f"{t} is not on the edge of the series")
    cut = t.cut
    terms = {e * t.V / t.U: c for e, c in z.terms() if e < cut}
    return PuiseuxSeries.from_terms(terms)


def trunc_dagger_star(z: PuiseuxSeries, t: EdgeTriple) -> PuiseuxSeries:
    base = trunc_dagger(z, t)
    c = z.coeff_at(t.cut)
    return base + PuiseuxSeries.monomial(c, t.W)


def deform(z: PuiseuxSeries, t: EdgeTriple) -> tuple[PuiseuxSeries, EdgeTriple]:
    return trunc_dagger(z, t), t
