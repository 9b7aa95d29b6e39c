"""Polynomials in Y over truncated Puiseux series in X.

Besides the views (orders, supports, initial and degree forms) this module
holds the exact bivariate algebra the rest of the package relies on:
pseudo-division and primitive gcds over K[X][Y], and Y-resultants by
fraction-free elimination of the Sylvester matrix.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .coeff import (
    ONE,
    ZERO,
    as_field,
    canon_key,
    inv,
    is_zero,
    pdivmod,
    pgcd,
    pmul,
    psub,
    ptrim,
    to_text,
)
from .errors import PrecisionExhausted, ZeroArgument
from .series import INF, EdgeTriple, PuiseuxSeries, edge_contains, trunc_dagger

__all__ = [
    "MeroPoly",
    "jacobian",
    "resultant_y",
    "compose_deformation",
    "eval_root",
    "gcd_y",
    "exact_quotient",
    "format_series",
    "int_mult",
]


class MeroPoly:
    """g = sum_j g^((j)) Y^j with PuiseuxSeries coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, PuiseuxSeries] | None = None):
        clean = {}
        for j, c in (coeffs or {}).items():
            if j < 0:
                raise ValueError("negative Y exponent")
            if not isinstance(c, PuiseuxSeries):
                c = PuiseuxSeries.const(c)
            if not c.is_known_zero():
                clean[j] = c
        self.coeffs = clean

    # -- constructors ------------------------------------------------------------
    @classmethod
    def from_terms(cls, terms: Mapping[tuple, object] | Iterable) -> "MeroPoly":
        """Build from {(i, j): c} meaning c X^i Y^j (i may be rational)."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        rows: dict[int, dict] = {}
        for (i, j), c in items:
            row = rows.setdefault(j, {})
            i = Fraction(i)
            row[i] = row.get(i, 0) + as_field(c)
        return cls({j: PuiseuxSeries.from_terms(row) for j, row in rows.items()})

    @classmethod
    def const(cls, c) -> "MeroPoly":
        if not isinstance(c, PuiseuxSeries):
            c = PuiseuxSeries.const(c)
        return cls({0: c})

    @classmethod
    def Y(cls) -> "MeroPoly":
        return cls({1: PuiseuxSeries.const(1)})

    @classmethod
    def X(cls, e=1) -> "MeroPoly":
        return cls({0: PuiseuxSeries.monomial(1, e)})

    @classmethod
    def from_ypoly(cls, coeffs: list) -> "MeroPoly":
        """From a list of field elements (coefficients of Y^j)."""
        return cls({j: PuiseuxSeries.const(c) for j, c in enumerate(coeffs)})

    # -- basic views --------------------------------------------------------------
    def __iter__(self):
        return iter(sorted(self.coeffs.items()))

    def coeff(self, j: int) -> PuiseuxSeries:
        return self.coeffs.get(j, PuiseuxSeries.zero())

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def deg_y(self):
        return max(self.coeffs) if self.coeffs else -INF

    @property
    def is_exact(self) -> bool:
        return all(c.is_exact for c in self.coeffs.values())

    @property
    def trunc(self):
        return min((c.trunc for c in self.coeffs.values()), default=INF)

    def is_laurent(self) -> bool:
        return self.is_exact and all(c.ram == 1 for c in self.coeffs.values())

    def ord_x(self):
        if not self.coeffs:
            return INF
        known = [c.ord_x() for c in self.coeffs.values() if c.coeffs]
        best = min(known) if known else INF
        for c in self.coeffs.values():
            if not c.coeffs and c.trunc <= best:
                raise PrecisionExhausted("X-order undetermined at current budget")
        return best

    def supp_x(self) -> set:
        return {e for c in self.coeffs.values() for e in c.support()}

    def supp_y(self) -> set:
        return {j for j, c in self.coeffs.items() if c.coeffs}

    def supp_xy(self) -> set:
        return {(e, j) for j, c in self.coeffs.items() for e in c.support()}

    def inco_x(self) -> list:
        """X-initial coefficient, a polynomial in Y over k (list)."""
        o = self.ord_x()
        if o == INF:
            return []
        return ptrim([self.coeff(j).coeff_at(o) for j in range(self.deg_y + 1)])

    def deco_y(self) -> PuiseuxSeries:
        return self.coeff(self.deg_y) if self.coeffs else PuiseuxSeries.zero()

    def ord_total(self):
        pts = self.supp_xy()
        if not pts:
            return INF
        best = min(e + j for e, j in pts)
        for j, c in self.coeffs.items():
            if not c.is_exact and c.trunc + j <= best:
                raise PrecisionExhausted("initial form undetermined at current budget")
        return best

    def info(self) -> "MeroPoly":
        o = self.ord_total()
        if o == INF:
            return MeroPoly()
        return MeroPoly.from_terms({(e, j): self.coeff(j).coeff_at(e) for e, j in self.supp_xy() if e + j == o})

    def deg_total(self):
        if not self.is_exact:
            raise PrecisionExhausted("total degree needs exact coefficients")
        pts = self.supp_xy()
        return max((e + j for e, j in pts), default=-INF)

    def defo(self) -> "MeroPoly":
        d = self.deg_total()
        if d == -INF:
            return MeroPoly()
        return MeroPoly.from_terms({(e, j): self.coeff(j).coeff_at(e) for e, j in self.supp_xy() if e + j == d})

    # -- arithmetic ------------------------------------------------------------------
    def __add__(self, other):
        other = _as_mero(other)
        out = dict(self.coeffs)
        for j, c in other.coeffs.items():
            out[j] = out[j] + c if j in out else c
        return MeroPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return MeroPoly({j: -c for j, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-_as_mero(other))

    def __rsub__(self, other):
        return _as_mero(other) - self

    def __mul__(self, other):
        if isinstance(other, PuiseuxSeries):
            return MeroPoly({j: c * other for j, c in self.coeffs.items()})
        if not isinstance(other, MeroPoly):
            c = as_field(other)
            return MeroPoly({j: s * c for j, s in self.coeffs.items()})
        out: dict[int, PuiseuxSeries] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                p = a * b
                out[i + j] = out[i + j] + p if i + j in out else p
        return MeroPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        r = MeroPoly.const(1)
        for _ in range(e):
            r = r * self
        return r

    def __eq__(self, other):
        if not isinstance(other, MeroPoly):
            try:
                other = _as_mero(other)
            except TypeError:
                return NotImplemented
        d = self - other
        return all(not c.coeffs and c.trunc == INF for c in d.coeffs.values()) and set(
            self.coeffs
        ) == set(other.coeffs)

    def __hash__(self):
        return hash(tuple(sorted((j, hash(c)) for j, c in self.coeffs.items())))

    def partial_y(self) -> "MeroPoly":
        return MeroPoly({j - 1: c * j for j, c in self.coeffs.items() if j > 0})

    def partial_x(self) -> "MeroPoly":
        return MeroPoly({j: c.derivative() for j, c in self.coeffs.items()})

    def partial(self, var: str) -> "MeroPoly":
        if var.upper() == "X":
            return self.partial_x()
        if var.upper() == "Y":
            return self.partial_y()
        raise ValueError("variable must be X or Y")

    def truncate(self, t) -> "MeroPoly":
        return MeroPoly({j: c.truncate(t) for j, c in self.coeffs.items()})

    def substitute_x(self, v) -> "MeroPoly":
        """X -> X^v."""
        return MeroPoly({j: c.substitute(v) for j, c in self.coeffs.items()})

    def shift_x(self, e) -> "MeroPoly":
        return MeroPoly({j: c.shift(e) for j, c in self.coeffs.items()})

    def eval_y(self, s: PuiseuxSeries) -> PuiseuxSeries:
        """Substitute a series for Y (Horner)."""
        acc = PuiseuxSeries.zero()
        for j in range(self.deg_y, -1, -1) if self.coeffs else []:
            acc = acc * s + self.coeff(j)
        return acc

    def compose_y(self, p: "MeroPoly") -> "MeroPoly":
        """Substitute the polynomial p(X, Y) for Y."""
        acc = MeroPoly()
        for j in range(self.deg_y, -1, -1) if self.coeffs else []:
            acc = acc * p + MeroPoly.const(self.coeff(j))
        return acc

    def map_coeffs(self, fn) -> "MeroPoly":
        return MeroPoly({j: c.map_coeffs(fn) for j, c in self.coeffs.items()})

    def monic(self, budget=INF) -> "MeroPoly":
        lc = self.deco_y()
        ilc = lc.inverse(budget) if not (len(lc.coeffs) == 1 and lc.is_exact) else lc.inverse()
        out = {j: c * ilc for j, c in self.coeffs.items()}
        out[self.deg_y] = PuiseuxSeries.const(1)
        return MeroPoly(out)

    def views(self) -> dict:
        return {
            "ord_x": self.ord_x(),
            "deg_y": self.deg_y,
            "supp_x": self.supp_x(),
            "supp_y": self.supp_y(),
            "supp_xy": self.supp_xy(),
            "inco_x": self.inco_x(),
            "deco_y": self.deco_y(),
            "ord_total": self.ord_total(),
            "info": self.info(),
            "deg_total": self.deg_total() if self.is_exact else None,
            "defo": self.defo() if self.is_exact else None,
        }

    def sort_key(self):
        return tuple((j, c.sort_key()) for j, c in sorted(self.coeffs.items()))

    def __repr__(self):
        return f"MeroPoly({format_mero(self)})"

    def __str__(self):
        return format_mero(self)


def _as_mero(x) -> MeroPoly:
    if isinstance(x, MeroPoly):
        return x
    return MeroPoly.const(x)


# ---------------------------------------------------------------------------
# text rendering (parseable by the CLI when coefficients are rational)


def _coef_text(c) -> str:
    t = to_text(c)
    if any(ch in t for ch in "+-* ") and not _is_simple_number(t):
        return f"({t})"
    return t


def _is_simple_number(t: str) -> bool:
    body = t[1:] if t.startswith("-") else t
    return body.replace("/", "", 1).isdigit()


def _mono(e: Fraction, j: int) -> str:
    parts = []
    if e != 0:
        es = str(e)
        parts.append("X" if e == 1 else (f"X^{es}" if e > 0 and e.denominator == 1 else f"X^({es})"))
    if j:
        parts.append("Y" if j == 1 else f"Y^{j}")
    return "*".join(parts)


def format_terms(items: list[tuple[Fraction, int, object]]) -> str:
    out = []
    for e, j, c in items:
        mono = _mono(e, j)
        ct = _coef_text(c)
        if not mono:
            s = ct
        elif ct == "1":
            s = mono
        elif ct == "-1":
            s = "-" + mono
        else:
            s = f"{ct}*{mono}"
        out.append(s)
    if not out:
        return "0"
    text = out[0]
    for s in out[1:]:
        text += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
    return text


def _big_o(t) -> str:
    t = Fraction(t)
    return f"O(X^{t})" if t.denominator == 1 and t >= 0 else f"O(X^({t}))"


def format_series(s: PuiseuxSeries) -> str:
    text = format_terms([(e, 0, c) for e, c in s.terms()])
    if s.trunc != INF:
        text += " + " + _big_o(s.trunc)
    return text


def format_mero(g: MeroPoly) -> str:
    items = []
    for j in sorted(g.coeffs, reverse=True):
        for e, c in g.coeffs[j].terms():
            items.append((e, j, c))
    text = format_terms(items)
    t = g.trunc
    if t != INF:
        text += " + " + _big_o(t)
    return text


# ---------------------------------------------------------------------------
# exact bivariate algebra over K[X][Y]
#
# A "bipoly" is a list (index j = Y-degree) of dense X-polynomials (lists of
# field elements, lowest degree first) with nonnegative X-exponents.


def to_bipoly(g: MeroPoly) -> tuple[list[list], int]:
    """Return (B, s) with g = X^(-s) * B and B having polynomial coefficients."""
    if not g.is_laurent():
        raise ValueError("exact algebra needs Laurent-polynomial coefficients")
    if g.is_zero():
        return [], 0
    low = min(int(c.ord_x()) for c in g.coeffs.values())
    s = -low
    rows = []
    for j in range(g.deg_y + 1):
        c = g.coeff(j)
        if not c.coeffs:
            rows.append([])
            continue
        top = int(c.max_exponent()) + s
        row = [ZERO] * (top + 1)
        for e, v in c.terms():
            row[int(e) + s] = v
        rows.append(row)
    return rows, s


def from_bipoly(rows: list[list], s: int = 0) -> MeroPoly:
    out = {}
    for j, row in enumerate(rows):
        if row:
            out[j] = PuiseuxSeries({i - s: c for i, c in enumerate(row)})
    return MeroPoly(out)


def _bp_trim(rows):
    rows = [ptrim(r) for r in rows]
    while rows and not rows[-1]:
        rows.pop()
    return rows


def _bp_content(rows) -> list:
    g: list = []
    for r in rows:
        if r:
            g = pgcd(g, r) if g else ptrim(r)
            if len(g) == 1:
                return [ONE]
    return [ONE] if not g else pgcd(g, g)


def _bp_primitive(rows):
    rows = _bp_trim(rows)
    if not rows:
        return rows
    c = _bp_content(rows)
    if len(c) > 1:
        rows = [pdivmod(r, c)[0] if r else [] for r in rows]
    # strip X-power factors too: X is a unit in k((X))
    low = min(_xval(r) for r in rows if r)
    if low:
        rows = [r[low:] if r else [] for r in rows]
    # normalize the leading coefficient's leading term to 1
    lc = rows[-1][-1]
    il = inv(lc)
    return [[x * il for x in r] for r in rows]


def _xval(r):
    for i, c in enumerate(r):
        if not is_zero(c):
            return i
    return len(r)


def _bp_prem(a, b):
    """Pseudo-remainder of a by b (both trimmed)."""
    db = len(b) - 1
    lb = b[-1]
    r = [list(x) for x in a]
    while r and len(r) - 1 >= db:
        lr = r[-1]
        k = len(r) - 1 - db
        r = [pmul(x, lb) if x else [] for x in r]
        for i in range(db):
            if b[i]:
                r[k + i] = psub(r[k + i], pmul(lr, b[i]))
        r.pop()
        r = _bp_trim(r)
    return r


def gcd_y(f: MeroPoly, g: MeroPoly) -> MeroPoly:
    """Primitive gcd in K(X)[Y] of two exact polynomials (normalized)."""
    a, _ = to_bipoly(f)
    b, _ = to_bipoly(g)
    a, b = _bp_primitive(a), _bp_primitive(b)
    if not a:
        return from_bipoly(b)
    if not b:
        return from_bipoly(a)
    if len(a) < len(b):
        a, b = b, a
    while b and len(b) > 1:
        r = _bp_prem(a, b)
        a, b = b, _bp_primitive(r)
    if b and len(b) == 1:
        return MeroPoly.const(1)
    return from_bipoly(_bp_primitive(a))


def laurent_divexact(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries | None:
    """a / b for exact Laurent polynomials, or None when b does not divide a."""
    if b.is_known_zero():
        raise ZeroArgument("division by zero")
    if a.is_known_zero():
        return a
    if a.ram != 1 or b.ram != 1:
        raise ValueError("Laurent division needs integral exponents")
    va, vb = min(a.coeffs), min(b.coeffs)
    pa = [ZERO] * (max(a.coeffs) - va + 1)
    for i, c in a.coeffs.items():
        pa[i - va] = c
    pb = [ZERO] * (max(b.coeffs) - vb + 1)
    for i, c in b.coeffs.items():
        pb[i - vb] = c
    q, r = pdivmod(pa, pb)
    if r:
        return None
    return PuiseuxSeries({i + va - vb: c for i, c in enumerate(q)})


def exact_quotient(f: MeroPoly, g: MeroPoly) -> MeroPoly | None:
    """f / g in K[X, 1/X][Y] when g divides f there; None otherwise."""
    if g.is_zero():
        raise ZeroArgument("division by the zero polynomial")
    if not (f.is_laurent() and g.is_laurent()):
        raise ValueError("exact division needs Laurent-polynomial coefficients")
    dg = g.deg_y
    lg = g.deco_y()
    r = f
    q: dict[int, PuiseuxSeries] = {}
    while not r.is_zero() and r.deg_y >= dg:
        k = r.deg_y - dg
        c = laurent_divexact(r.deco_y(), lg)
        if c is None:
            return None
        q[k] = c
        r = r - g * MeroPoly({k: c})
        if not r.is_zero() and r.deg_y >= k + dg and k + dg in r.coeffs:
            return None
    if not r.is_zero():
        return None
    return MeroPoly(q)


# ---------------------------------------------------------------------------
# resultants


def _det_bareiss(mat: list[list[list]]) -> list:
    """Determinant of a square matrix with X-polynomial entries."""
    n = len(mat)
    if n == 0:
        return [ONE]
    m = [[ptrim(x) for x in row] for row in mat]
    sign = 1
    prev = [ONE]
    for k in range(n - 1):
        if not m[k][k]:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return []
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = psub(pmul(m[i][j], m[k][k]), pmul(m[i][k], m[k][j]))
                q, rem = pdivmod(num, prev) if num else ([], [])
                m[i][j] = q
            m[i][k] = []
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return d if sign == 1 else [-c for c in d]


def sylvester(a: list[list], b: list[list]) -> list[list[list]]:
    """Sylvester matrix of two bipolys (highest Y-degree first in each row)."""
    da, db = len(a) - 1, len(b) - 1
    n = da + db
    rows = []
    for i in range(db):
        row = [[] for _ in range(n)]
        for k in range(da + 1):
            row[i + k] = a[da - k]
        rows.append(row)
    for i in range(da):
        row = [[] for _ in range(n)]
        for k in range(db + 1):
            row[i + k] = b[db - k]
        rows.append(row)
    return rows


def resultant_y(f: MeroPoly, g: MeroPoly) -> PuiseuxSeries:
    """Res_Y(f, g) for exact Laurent-coefficient polynomials."""
    if f.is_zero() or g.is_zero():
        return PuiseuxSeries.zero()
    a, sa = to_bipoly(f)
    b, sb = to_bipoly(g)
    a, b = _bp_trim(a), _bp_trim(b)
    da, db = len(a) - 1, len(b) - 1
    if da == 0 and db == 0:
        return PuiseuxSeries.const(1)
    if da == 0:
        det = [ONE]
        for _ in range(db):
            det = pmul(det, a[0])
    elif db == 0:
        det = [ONE]
        for _ in range(da):
            det = pmul(det, b[0])
    else:
        det = _det_bareiss(sylvester(a, b))
    shift = sa * db + sb * da
    return PuiseuxSeries({i - shift: c for i, c in enumerate(det)})


def jacobian(F: MeroPoly, G: MeroPoly) -> MeroPoly:
    return F.partial_x() * G.partial_y() - G.partial_x() * F.partial_y()


# ---------------------------------------------------------------------------
# deformations and root evaluation


def compose_deformation(H: MeroPoly, z: PuiseuxSeries, t: EdgeTriple) -> MeroPoly:
    """H(X^V, z†(X,U,V,W) + X^W Y)."""
    if not edge_contains(z, t):
        from .errors import NotOnEdge

        raise NotOnEdge(f"{t} not on the edge")
    zd = trunc_dagger(z, t)
    sub = MeroPoly({0: zd, 1: PuiseuxSeries.monomial(1, t.W)})
    return H.substitute_x(t.V).compose_y(sub)


def eval_root(H: MeroPoly, n: int, z: PuiseuxSeries) -> PuiseuxSeries:
    """H(X^n, z(X))."""
    return H.substitute_x(n).eval_y(z)


def ypoly_key(p: list):
    return tuple(canon_key(c) for c in p)


# ---------------------------------------------------------------------------
# intersection multiplicity


def _exact_branch_poly(b):
    """The exact monic polynomial of a branch, or None."""
    pc = b.piece
    if pc is not None and pc.deg_y == b.n and len(pc.deco_y().coeffs) == 1:
        return b.poly()
    return None


def _int_resultant(f: MeroPoly, g: MeroPoly):
    res = resultant_y(f, g)
    if not res.coeffs:
        return INF
    lc = f.deco_y()
    return res.ord_x() - g.deg_y * lc.ord_x()


def _int_substitution(b, g: MeroPoly):
    while True:
        v = b.evaluate(g)
        if v.coeffs:
            return v.ord_x()
        if v.trunc == INF:
            return INF
        if g.is_exact and g.deg_y > 0 and b.ctx.knows(b, g):
            return INF
        b.grow()


def int_mult(f, g: MeroPoly, route: str = "auto"):
    """int(f, g) = ord_X Res_Y(f, g) = ord_X g(X^n, z(X)).

    ``f`` is a branch or an exact polynomial.  ``route`` picks the
    resultant, the root substitution, or (auto) the resultant whenever both
    sides are exact.
    """
    g = _as_mero(g)
    if g.is_zero():
        raise ZeroArgument("int(f, 0) is infinite")
    if isinstance(f, MeroPoly):
        if route != "substitution" and f.is_exact and g.is_exact:
            return _int_resultant(f, g)
        from .newton import current_context

        fac = current_context().factor(f)
        return sum(m * _int_substitution(b, g) for b, m in fac.factors)
    fp = _exact_branch_poly(f) if g.is_exact else None
    if route == "resultant" and fp is None:
        raise ValueError("the resultant route needs exact polynomials")
    if route != "substitution" and fp is not None:
        return _int_resultant(fp, g)
    return _int_substitution(f, g)
