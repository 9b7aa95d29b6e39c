"""Exact arithmetic in a lazily grown tower of algebraic extensions of Q.

Rationals are plain :class:`fractions.Fraction` values.  Anything algebraic
is an :class:`Alg`, a polynomial in the generator of some tower level with
coefficients taken from the levels below.  Minimal polynomials are not
certified irreducible over the level below; instead zero tests and
inversions use dynamic evaluation: a representation that turns out to be a
zero divisor splits the level's modulus by the discovered gcd, and every
element created earlier is reduced lazily into the new quotient.

Polynomials over the field are plain Python lists, lowest degree first.
"""

from __future__ import annotations

import contextvars
import math
from fractions import Fraction
from typing import Sequence

from .errors import DivisionByZero, NotMonic, NotSquarefree

__all__ = [
    "Alg",
    "Tower",
    "adjoin_root",
    "as_field",
    "canon_key",
    "current_tower",
    "inv",
    "is_zero",
    "primitive_root_of_unity",
    "pdivmod",
    "pgcd",
    "pderiv",
    "peval",
    "pmul",
    "padd",
    "psub",
    "pscale",
    "ptrim",
    "pmonic",
    "ppow",
    "is_rational",
]

ZERO = Fraction(0)
ONE = Fraction(1)


class _Level:
    __slots__ = ("index", "minpoly", "label", "certified")

    def __init__(self, index, minpoly, label, certified=False):
        self.index = index
        self.minpoly = list(minpoly)
        self.label = label
        # True when the modulus is known irreducible over the levels below
        self.certified = certified


class Tower:
    """A computation context owning an append-only list of extension levels.

    Use as a context manager to make it the current tower.
    """

    def __init__(self):
        self.levels: list[_Level] = []
        self.version = 0
        self._unity: dict[int, object] = {}
        self._tokens = []

    def __enter__(self):
        self._tokens.append(_CURRENT.set(self))
        return self

    def __exit__(self, *exc):
        _CURRENT.reset(self._tokens.pop())
        return False

    def __repr__(self):
        return f"Tower(depth={len(self.levels)})"

    @property
    def depth(self) -> int:
        return len(self.levels)

    def minpoly(self, level: int) -> list:
        lv = self.levels[level - 1]
        mp = [_fresh(c) for c in lv.minpoly]
        lv.minpoly = mp
        return mp

    def describe(self) -> list[dict]:
        """Minimal polynomials of every level, in serializable form."""
        out = []
        for lv in self.levels:
            out.append(
                {
                    "level": lv.index,
                    "label": lv.label,
                    "minpoly": [serialize(c) for c in self.minpoly(lv.index)],
                }
            )
        return out

    # -- growth -----------------------------------------------------------
    def _append(self, minpoly, label, q_irreducible=False) -> "Alg":
        idx = len(self.levels) + 1
        cert = False
        if q_irreducible and all(lv.certified for lv in self.levels):
            # degrees coprime to [K:Q] stay irreducible over K
            base = 1
            for lv in self.levels:
                base *= len(lv.minpoly) - 1
            cert = math.gcd(base, len(minpoly) - 1) == 1
        self.levels.append(_Level(idx, minpoly, label, cert))
        return Alg(self, idx, (ZERO, ONE))

    def certified(self, level: int) -> bool:
        return self.levels[level - 1].certified

    def _split(self, level: int, factor: list):
        lv = self.levels[level - 1]
        lv.minpoly = list(factor)
        self.version += 1


_CURRENT: contextvars.ContextVar[Tower] = contextvars.ContextVar("merocurve_tower")
_DEFAULT = Tower()


def current_tower() -> Tower:
    return _CURRENT.get(_DEFAULT)


def _level(x) -> int:
    return x.level if isinstance(x, Alg) else 0


def as_field(x):
    """Coerce ints and Fractions into field elements."""
    if isinstance(x, Alg):
        return _fresh(x)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not a field element: {x!r}")


def _fresh(x):
    if isinstance(x, Alg):
        if x._ver != x.tower.version:
            return _make(x.tower, x.level, [_fresh(c) for c in x.rep])
        return x
    return x


def _make(tower: Tower, level: int, rep: list):
    """Reduce ``rep`` modulo the level's modulus and demote constants."""
    m = tower.minpoly(level)
    d = len(m) - 1
    rep = [_fresh(c) for c in rep]
    for i in range(len(rep) - 1, d - 1, -1):
        c = rep[i]
        if _structural_zero(c):
            continue
        rep[i] = ZERO
        for k in range(d):
            if not _structural_zero(m[k]):
                rep[i - d + k] = _sub(rep[i - d + k], _mul(c, m[k]))
    del rep[d:]
    while rep and _structural_zero(rep[-1]):
        rep.pop()
    if not rep:
        return ZERO
    if len(rep) == 1:
        return rep[0]
    return Alg(tower, level, tuple(rep))


def _structural_zero(x) -> bool:
    return not isinstance(x, Alg) and x == 0


class Alg:
    """An algebraic number: a polynomial in one tower generator.

    Instances always have a non-constant representation; constants are
    demoted to the level below on construction.
    """

    __slots__ = ("tower", "level", "rep", "_ver")

    def __init__(self, tower: Tower, level: int, rep: tuple):
        self.tower = tower
        self.level = level
        self.rep = rep
        self._ver = tower.version

    # arithmetic dispatch
    def __add__(self, o):
        return _add(_fresh(self), _coerce(o))

    __radd__ = __add__

    def __sub__(self, o):
        return _sub(_fresh(self), _coerce(o))

    def __rsub__(self, o):
        return _sub(_coerce(o), _fresh(self))

    def __mul__(self, o):
        return _mul(_fresh(self), _coerce(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return _mul(_fresh(self), inv(_coerce(o)))

    def __rtruediv__(self, o):
        return _mul(_coerce(o), inv(_fresh(self)))

    def __neg__(self):
        return _neg(_fresh(self))

    def __pos__(self):
        return _fresh(self)

    def __pow__(self, e: int):
        return fpow(self, e)

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, Alg)):
            return is_zero(_sub(_fresh(self), _coerce(o)))
        return NotImplemented

    def __hash__(self):
        return hash(canon_key(self))

    def __bool__(self):
        return not is_zero(self)

    def __repr__(self):
        return to_text(self)


def _coerce(o):
    if isinstance(o, Alg):
        return _fresh(o)
    if isinstance(o, Fraction):
        return o
    if isinstance(o, int):
        return Fraction(o)
    raise TypeError(f"cannot combine algebraic number with {type(o).__name__}")


def _tower_of(a, b) -> Tower:
    ta = a.tower if isinstance(a, Alg) else None
    tb = b.tower if isinstance(b, Alg) else None
    if ta is not None and tb is not None and ta is not tb:
        raise ValueError("algebraic numbers from different towers")
    return ta or tb


def _add(a, b):
    la, lb = _level(a), _level(b)
    if la == 0 and lb == 0:
        return a + b
    t = _tower_of(a, b)
    if la > lb:
        rep = list(a.rep)
        rep[0] = _add(rep[0], b)
        return _make(t, la, rep)
    if lb > la:
        rep = list(b.rep)
        rep[0] = _add(a, rep[0])
        return _make(t, lb, rep)
    n = max(len(a.rep), len(b.rep))
    rep = [
        _add(a.rep[i] if i < len(a.rep) else ZERO, b.rep[i] if i < len(b.rep) else ZERO)
        for i in range(n)
    ]
    return _make(t, la, rep)


def _neg(a):
    if not isinstance(a, Alg):
        return -a
    return Alg(a.tower, a.level, tuple(_neg(c) for c in a.rep))


def _sub(a, b):
    return _add(a, _neg(b))


def _mul(a, b):
    la, lb = _level(a), _level(b)
    if la == 0 and lb == 0:
        return a * b
    t = _tower_of(a, b)
    if la < lb:
        a, b, la, lb = b, a, lb, la
    if _structural_zero(b):
        return ZERO
    if la > lb:
        return _make(t, la, [_mul(c, b) for c in a.rep])
    ra, rb = a.rep, b.rep
    out = [ZERO] * (len(ra) + len(rb) - 1)
    for i, x in enumerate(ra):
        if _structural_zero(x):
            continue
        for j, y in enumerate(rb):
            if _structural_zero(y):
                continue
            out[i + j] = _add(out[i + j], _mul(x, y))
    return _make(t, la, out)


def fpow(a, e: int):
    a = as_field(a)
    if e < 0:
        return fpow(inv(a), -e)
    result = ONE
    base = a
    while e:
        if e & 1:
            result = _mul(result, base)
        e >>= 1
        if e:
            base = _mul(base, base)
    return result


def is_rational(x) -> bool:
    return not isinstance(_fresh(x), Alg)


# ---------------------------------------------------------------------------
# zero tests and inversion under dynamic evaluation


def is_zero(a) -> bool:
    """Certified zero test.

    A nonzero answer is always backed by invertibility; a zero divisor
    splits its level (keeping the lower-degree factor, the vanishing one on
    ties) before answering.
    """
    a = as_field(a)
    while isinstance(a, Alg):
        t, lvl = a.tower, a.level
        if t.certified(lvl):
            return False
        m = t.minpoly(lvl)
        g = pgcd(list(a.rep), m)
        a = _fresh(a)
        if not isinstance(a, Alg) or a.level != lvl:
            continue
        m = t.minpoly(lvl)
        if len(g) <= 1:
            return False
        h, r = pdivmod(m, g)
        if len(g) <= len(h):
            t._split(lvl, g)
        else:
            t._split(lvl, pmonic(h))
        a = _fresh(a)
    return a == 0


def inv(a):
    a = as_field(a)
    while isinstance(a, Alg):
        t, lvl = a.tower, a.level
        m = t.minpoly(lvl)
        g, s, _ = pxgcd(list(a.rep), m)
        if len(g) == 1:
            # the Bezout identity survives any split made meanwhile
            return _make(t, lvl, s)
        a2 = _fresh(a)
        if not isinstance(a2, Alg) or a2.level != lvl:
            a = a2
            continue
        h, _ = pdivmod(t.minpoly(lvl), g)
        t._split(lvl, pmonic(h))
        a = _fresh(a)
    if a == 0:
        raise DivisionByZero("division by zero")
    return 1 / a


def div(a, b):
    return _mul(as_field(a), inv(b))


# ---------------------------------------------------------------------------
# univariate polynomials over the field (lists, low degree first)


def ptrim(p: Sequence) -> list:
    p = [as_field(c) for c in p]
    while p and is_zero(p[-1]):
        p.pop()
    return [_fresh(c) for c in p]


def padd(a, b):
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO) for i in range(n)])


def psub(a, b):
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else ZERO) - (b[i] if i < len(b) else ZERO) for i in range(n)])


def pscale(a, c):
    return ptrim([x * c for x in a])


def pmul(a, b):
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return ptrim(out)


def ppow(a, e):
    r = [ONE]
    for _ in range(e):
        r = pmul(r, a)
    return r


def pdivmod(a, b):
    a = ptrim(a)
    b = ptrim(b)
    if not b:
        raise DivisionByZero("polynomial division by zero")
    lc = inv(b[-1])
    q = [ZERO] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    db = len(b) - 1
    while len(r) - 1 >= db and r:
        c = r[-1] * lc
        k = len(r) - 1 - db
        q[k] = c
        for i in range(db + 1):
            r[k + i] = r[k + i] - c * b[i]
        r.pop()
        r = ptrim(r)
    return ptrim(q), r


def pmonic(a):
    a = ptrim(a)
    if not a:
        return a
    c = inv(a[-1])
    return [x * c for x in a[:-1]] + [ONE]


def pgcd(a, b):
    a, b = ptrim(a), ptrim(b)
    while b:
        _, r = pdivmod(a, b)
        a, b = b, r
    return pmonic(a)


def pxgcd(a, b):
    """Return (g, s, t) with s*a + t*b = g, g monic (or empty)."""
    r0, r1 = ptrim(a), ptrim(b)
    s0, s1 = [ONE], []
    t0, t1 = [], [ONE]
    while r1:
        q, r = pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, psub(s0, pmul(q, s1))
        t0, t1 = t1, psub(t0, pmul(q, t1))
    if not r0:
        return [], [], []
    c = inv(r0[-1])
    return pscale(r0, c), pscale(s0, c), pscale(t0, c)


def pderiv(a):
    return ptrim([a[i] * i for i in range(1, len(a))])


def peval(a, x):
    acc = ZERO
    for c in reversed(a):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# growing the tower


def _rational_factors(p) -> list[list[Fraction]]:
    """Irreducible factors over Q of a rational polynomial, canonical order."""
    import sympy

    t = sympy.Symbol("t")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * t**i for i, c in enumerate(p))
    _, facs = sympy.factor_list(sympy.Poly(expr, t, domain="QQ"))
    out = []
    for f, _mult in facs:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(f.all_coeffs())]
        out.append(pmonic(coeffs))
    out.sort(key=lambda f: (len(f), [(c.numerator, c.denominator) for c in f]))
    return out


def adjoin_root(p: Sequence, tower: Tower | None = None, label: str = "theta"):
    """Return a root of the monic squarefree polynomial ``p``.

    Rational inputs are factored over Q first, so their levels carry
    genuinely irreducible moduli.  Over algebraic coefficients the existing
    generators are tried as roots before a new level is appended.
    """
    tower = tower or current_tower()
    p = ptrim(p)
    if len(p) < 2:
        raise ValueError("adjoin_root needs a polynomial of degree >= 1")
    if not (p[-1] == 1):
        raise NotMonic("adjoin_root expects a monic polynomial")
    if len(pgcd(p, pderiv(p))) > 1:
        raise NotSquarefree("adjoin_root expects a squarefree polynomial")
    if len(p) == 2:
        return -p[0]
    rational = all(is_rational(c) for c in p)
    if rational:
        p = _rational_factors(p)[0]
        if len(p) == 2:
            return -p[0]
    for lv in tower.levels:
        gen = _make(tower, lv.index, [ZERO, ONE])
        if is_zero(peval(p, gen)):
            return _fresh(gen)
    return tower._append(p, label, rational)


def cyclotomic(n: int) -> list[Fraction]:
    """The n-th cyclotomic polynomial over Q."""
    num = [Fraction(-1)] + [ZERO] * (n - 1) + [ONE]
    for d in range(1, n):
        if n % d == 0:
            num, _ = pdivmod(num, cyclotomic(d))
    return num


def primitive_root_of_unity(n: int, tower: Tower | None = None):
    tower = tower or current_tower()
    if n < 1:
        raise ValueError("order must be positive")
    if n == 1:
        return ONE
    if n == 2:
        return Fraction(-1)
    cached = tower._unity.get(n)
    if cached is not None:
        return _fresh(cached)
    for m, z in sorted(tower._unity.items()):
        if m % n == 0:
            r = fpow(z, m // n)
            tower._unity[n] = r
            return r
    z = tower._append(cyclotomic(n), f"zeta{n}", True)
    tower._unity[n] = z
    return z


# ---------------------------------------------------------------------------
# canonical forms


def canon_key(x):
    """A totally ordered, representation-level key (equal iff equal)."""
    x = as_field(x)
    if isinstance(x, Alg):
        return (x.level, tuple(canon_key(c) for c in x.rep))
    return (0, x)


def serialize(x):
    """JSON-friendly canonical form: "p/q" for rationals, nested otherwise."""
    x = as_field(x)
    if isinstance(x, Alg):
        return {"level": x.level, "rep": [serialize(c) for c in x.rep]}
    return frac_str(x)


def frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def to_text(x) -> str:
    x = as_field(x)
    if isinstance(x, Alg):
        name = f"t{x.level}"
        terms = []
        for i, c in enumerate(x.rep):
            if _structural_zero(c):
                continue
            ct = to_text(c)
            if isinstance(c, Alg):
                ct = f"({ct})"
            mono = "" if i == 0 else (name if i == 1 else f"{name}^{i}")
            if not mono:
                terms.append(ct)
            elif ct == "1":
                terms.append(mono)
            elif ct == "-1":
                terms.append(f"-{mono}")
            else:
                terms.append(f"{ct}*{mono}")
        return " + ".join(terms).replace("+ -", "- ")
    return str(x)
