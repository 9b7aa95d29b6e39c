"""Newton polygons and the Newton–Puiseux factorization engine.

Every exact polynomial handed to :func:`factor` is registered in a
:class:`Context`.  The context keeps a coprime base of squarefree "pieces"
built by gcd refinement across everything registered so far, and each piece
is expanded once.  Consequently a branch shared by two polynomials (say F
and a factor of J(F, G)) is the *same* :class:`Branch` object in both
factorizations, and two distinct branch objects of one context are known to
be different curves.  Equality of branches is therefore never inferred from
agreeing truncations.

A branch of degree n is stored through one root z(X) of f(X^n, Y), so its
exponents are integers.  The singular part of z comes out of the polygon
recursion and is exact; after it the root is isolated and the remaining
tail is produced by quadratic Newton lifting on demand.
"""

from __future__ import annotations

import contextvars
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .coeff import (
    ONE,
    ZERO,
    Tower,
    adjoin_root,
    as_field,
    canon_key,
    fpow,
    is_zero,
    pderiv,
    pdivmod,
    pgcd,
    pmonic,
    primitive_root_of_unity,
    ptrim,
)
from .errors import (
    ConstantInput,
    NotMonic,
    NotSquarefree,
    PrecisionCapExceeded,
    ZeroPolynomial,
)
from .meropoly import MeroPoly, eval_root, exact_quotient, gcd_y
from .series import INF, PuiseuxSeries

__all__ = [
    "Branch",
    "Context",
    "Face",
    "Factorization",
    "current_context",
    "factor",
    "newton_polygon",
    "puiseux_roots",
    "refine",
    "squarefree_part",
]

DEFAULT_CAP_FACTOR = 64


# ---------------------------------------------------------------------------
# Newton polygon


@dataclass(frozen=True)
class Face:
    """One lower edge of the Newton polygon.

    ``slope`` is measured with Y-degree on the horizontal axis and X-order
    on the vertical one, so roots cut out by the face have X-order
    ``-slope``.  ``poly`` lists the coefficients of Y^j (j from 0) of the
    face polynomial; only the lattice points on the edge contribute.
    """

    slope: Fraction
    length: int
    poly: tuple
    left: tuple = (0, Fraction(0))
    right: tuple = (0, Fraction(0))

    @property
    def root_order(self) -> Fraction:
        return -self.slope


def _points(f: MeroPoly) -> list[tuple[int, Fraction]]:
    return [(j, f.coeff(j).ord_x()) for j in sorted(f.coeffs)]


def _lower_hull(pts):
    hull: list = []
    for p in pts:
        while len(hull) >= 2:
            (j0, i0), (j1, i1) = hull[-2], hull[-1]
            if (j1 - j0) * (p[1] - i0) - (i1 - i0) * (p[0] - j0) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def newton_polygon(f: MeroPoly) -> list[Face]:
    if f.is_zero():
        raise ZeroPolynomial("the zero polynomial has no Newton polygon")
    pts = _points(f)
    hull = _lower_hull(pts)
    if len(hull) == 1:
        j, i = hull[0]
        poly = [ZERO] * j + [f.coeff(j).coeff_at(i)]
        return [Face(Fraction(0), 0, tuple(poly), hull[0], hull[0])]
    faces = []
    for (j0, i0), (j1, i1) in zip(hull, hull[1:]):
        slope = Fraction(i1 - i0) / (j1 - j0)
        poly = [ZERO] * (j1 + 1)
        for j in range(j0, j1 + 1):
            if j in f.coeffs:
                poly[j] = f.coeff(j).coeff_at(i0 + slope * (j - j0))
        faces.append(Face(slope, j1 - j0, tuple(poly), (j0, i0), (j1, i1)))
    return faces


# ---------------------------------------------------------------------------
# univariate root finding over the tower


def _yun(p: list) -> list[tuple[list, int]]:
    """Squarefree decomposition of a univariate polynomial over K."""
    p = pmonic(p)
    out = []
    dp = pderiv(p)
    g = pgcd(p, dp)
    c, _ = pdivmod(p, g)
    d, _ = pdivmod(dp, g)
    d = _psub(d, pderiv(c))
    k = 1
    while len(c) > 1:
        a = pgcd(c, d)
        if len(a) > 1:
            out.append((a, k))
        c, _ = pdivmod(c, a)
        d, _ = pdivmod(d, a)
        d = _psub(d, pderiv(c))
        k += 1
    return out


def _psub(a, b):
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else ZERO) - (b[i] if i < len(b) else ZERO) for i in range(n)])


def _squarefree_roots(s: list, tower: Tower) -> list:
    s = pmonic(s)
    d = len(s) - 1
    if d == 1:
        return [-s[0]]
    if all(is_zero(c) for c in s[1:-1]):
        theta = adjoin_root(s, tower)
        zeta = primitive_root_of_unity(d, tower)
        return [theta * fpow(zeta, k) for k in range(d)]
    roots = []
    while len(s) > 2:
        theta = adjoin_root(s, tower)
        roots.append(theta)
        s, _ = pdivmod(s, [-theta, ONE])
    roots.append(-s[0])
    return roots


def _nonzero_roots(phi: list, tower: Tower) -> list[tuple[object, int]]:
    out = []
    for s, k in _yun(phi):
        for r in _squarefree_roots(s, tower):
            out.append((r, k))
    return out


# ---------------------------------------------------------------------------
# branches


class _Tail:
    """Regular-part state: z = S + X^L * Y1 with P(X, Y1) = 0, Y1(0) = 0."""

    __slots__ = ("P", "dP", "S", "L", "Y", "k", "exact")

    def __init__(self, P: MeroPoly, S: dict, L: int):
        self.P = P
        self.dP = P.partial_y()
        self.S = S
        self.L = L
        self.Y = PuiseuxSeries.zero()
        self.k = 1
        self.exact = P.coeff(0).is_known_zero()

    def lift(self, k_target: int):
        k = self.k
        Y = self.Y
        while k < k_target and not self.exact:
            k2 = min(2 * k, k_target)
            Yt = PuiseuxSeries(Y.coeffs, 1, k2)
            R = self.P.eval_y(Yt)
            D = self.dP.eval_y(Yt)
            corr = R * D.inverse(k2)
            new = Yt - corr
            fresh = any(i >= k for i in new.coeffs)
            Y = PuiseuxSeries(new.coeffs)
            k = k2
            if not fresh and self.P.eval_y(Y).is_known_zero():
                self.exact = True
        self.Y, self.k = Y, k

    def root(self) -> PuiseuxSeries:
        base = PuiseuxSeries(dict(self.S))
        tail = self.Y.shift(self.L)
        z = base + tail
        if self.exact:
            return z
        return PuiseuxSeries(z.coeffs, 1, self.L + self.k)


class Branch:
    """An irreducible monic factor f of degree n over k((X)).

    ``root`` is one root z(X) of f(X^n, Y); its conjugates are z(w^j X) with
    w a primitive n-th root of unity.  Refinement extends ``root`` in place;
    coefficients already stored never change.
    """

    def __init__(self, n: int, root: PuiseuxSeries, ctx: "Context", tail: _Tail | None = None):
        self.n = n
        self._root = root
        self.ctx = ctx
        self._tail = tail
        self._conj: dict = {}
        self.piece = None  # exact polynomial of the coprime piece holding it

    # -- views -------------------------------------------------------------
    @property
    def root(self) -> PuiseuxSeries:
        return self._root

    @property
    def prec(self):
        """Budget of the root in its own variable (INF when exact)."""
        return self._root.trunc

    @property
    def prec_x(self):
        return INF if self._root.trunc == INF else Fraction(self._root.trunc) / self.n

    @property
    def is_exact(self) -> bool:
        return self._root.trunc == INF

    @property
    def degree(self) -> int:
        return self.n

    @property
    def cap(self) -> Fraction:
        return self.ctx.cap_for(self)

    def __repr__(self):
        return f"Branch(n={self.n}, z={self._root!r})"

    def sort_key(self):
        return (self.n, self._root.sort_key())

    # -- refinement ------------------------------------------------------------
    def refine(self, budget_z) -> "Branch":
        """Make the root known below exponent ``budget_z`` (own variable)."""
        if self.is_exact or budget_z <= self._root.trunc:
            return self
        if self._tail is None:
            raise PrecisionCapExceeded("branch has no refinement engine")
        if Fraction(budget_z) / self.n > self.cap:
            raise PrecisionCapExceeded(
                f"refinement to {Fraction(budget_z) / self.n} exceeds the cap {self.cap}"
            )
        self._tail.lift(math.ceil(budget_z) - self._tail.L)
        self._root = self._tail.root()
        self._conj.clear()
        return self

    def refine_x(self, tau) -> "Branch":
        """Make the Puiseux root known below x-exponent ``tau``."""
        return self.refine(Fraction(tau) * self.n if tau != INF else INF)

    def grow(self) -> "Branch":
        """Double the known range (in x-units, at least one more step)."""
        cur = self.prec_x
        step = max(abs(cur), Fraction(1, 1))
        target = cur + step
        if target > self.cap:
            if cur >= self.cap:
                raise PrecisionCapExceeded(f"branch precision cap {self.cap} reached")
            target = self.cap
        return self.refine_x(target)

    # -- Puiseux form --------------------------------------------------------------
    def conjugate(self, j: int = 0) -> PuiseuxSeries:
        """The root y(x) = z(w^j x^(1/n)) as a Puiseux series in x."""
        j %= self.n
        key = (j, self._root.trunc)
        hit = self._conj.get(key)
        if hit is not None:
            return hit
        z = self._root
        if j == 0:
            coeffs = dict(z.coeffs)
        else:
            w = primitive_root_of_unity(self.n, self.ctx.tower)
            coeffs = {i: c * fpow(w, (i * j) % self.n) for i, c in z.coeffs.items()}
        y = PuiseuxSeries(coeffs, self.n, self.prec_x)
        self._conj[key] = y
        return y

    def puiseux(self) -> PuiseuxSeries:
        return self.conjugate(0)

    def conjugates(self) -> list[PuiseuxSeries]:
        return [self.conjugate(j) for j in range(self.n)]

    def poly(self) -> MeroPoly:
        """f = prod_j (Y - y_j(x)), truncated to what the root determines."""
        pc = self.piece
        if pc is not None and pc.deg_y == self.n and len(pc.deco_y().coeffs) == 1:
            return pc.monic()
        acc = MeroPoly.const(1)
        for y in self.conjugates():
            acc = acc * MeroPoly({0: -y, 1: PuiseuxSeries.const(1)})
        return _clean_poly(acc)

    def evaluate(self, H: MeroPoly) -> PuiseuxSeries:
        """H(X^n, z(X)) at the current budget."""
        return eval_root(H, self.n, self._root)


def _clean_poly(g: MeroPoly) -> MeroPoly:
    """Drop the ramification the conjugate product cannot actually carry."""
    out = {}
    for j, c in g.coeffs.items():
        coeffs = {i: v for i, v in c.coeffs.items() if i % c.ram == 0}
        out[j] = PuiseuxSeries({i // c.ram: v for i, v in coeffs.items()}, 1, c.trunc)
    return MeroPoly(out)


# ---------------------------------------------------------------------------
# the singular part of the expansion


def _substitute(P: MeroPoly, q: int, m: int, alpha, s) -> MeroPoly:
    """X^(-s) P(X^q, X^m (alpha + Y))."""
    sub = MeroPoly({0: PuiseuxSeries.monomial(alpha, m), 1: PuiseuxSeries.monomial(1, m)})
    return P.substitute_x(q).compose_y(sub).shift_x(-s)


def _expand(P: MeroPoly, e: int, S: dict, L: int, first: bool, ctx: "Context") -> list[Branch]:
    j0 = min(P.coeffs)
    leaves: list[Branch] = []
    if j0 >= 1:
        if j0 > 1:
            raise NotSquarefree("repeated root met during expansion")
        leaves.append(Branch(e, PuiseuxSeries(dict(S)), ctx))
    for face in newton_polygon(P):
        if face.length == 0:
            continue
        gamma = -face.slope
        if not first and gamma <= 0:
            continue
        m, q = gamma.numerator, gamma.denominator
        jl, il = face.left
        value = il + gamma * jl
        s = int(q * value)
        phi = [face.poly[jl + q * k] for k in range(face.length // q + 1)]
        for c, r in _nonzero_roots(phi, ctx.tower):
            alpha = adjoin_root([-c] + [ZERO] * (q - 1) + [ONE], ctx.tower) if q > 1 else c
            Pn = _substitute(P, q, m, alpha, s)
            Sn = {k * q: v for k, v in S.items()}
            Ln = q * L + m
            Sn[Ln] = Sn.get(Ln, ZERO) + alpha
            if r == 1:
                tail = _Tail(Pn, Sn, Ln)
                leaves.append(Branch(e * q, tail.root(), ctx, tail))
            else:
                leaves.extend(_expand(Pn, e * q, Sn, Ln, False, ctx))
    return leaves


# ---------------------------------------------------------------------------
# squarefree decomposition over k((X))


def _yun_y(F: MeroPoly) -> list[tuple[MeroPoly, int]]:
    dF = F.partial_y()
    g = gcd_y(F, dF)
    c = _div(F, g)
    d = _sub_deriv(_div(dF, g), c)
    out = []
    k = 1
    while c.deg_y > 0:
        a = gcd_y(c, d) if not d.is_zero() else c
        if a.deg_y > 0:
            out.append((a, k))
        c = _div(c, a)
        d = _sub_deriv(_div(d, a), c) if not d.is_zero() else d
        k += 1
    return out


def _div(f: MeroPoly, g: MeroPoly) -> MeroPoly:
    q = exact_quotient(f, g)
    if q is None:
        raise ArithmeticError("inexact division in squarefree decomposition")
    return q


def _sub_deriv(d: MeroPoly, c: MeroPoly) -> MeroPoly:
    return d - c.partial_y()


def _normalize(g: MeroPoly) -> MeroPoly:
    """Primitive representative with unit leading coefficient when possible."""
    lc = g.deco_y()
    if len(lc.coeffs) == 1:
        return g.monic()
    return g


def squarefree_part(F: MeroPoly) -> tuple[MeroPoly, bool]:
    _check_exact(F)
    if F.deg_y <= 0:
        raise ConstantInput("input has no Y-dependence")
    g = gcd_y(F, F.partial_y())
    return _normalize(_div(F, g)), g.deg_y > 0


def _check_exact(F: MeroPoly):
    if F.is_zero():
        raise ZeroPolynomial("zero polynomial")
    if not F.is_laurent():
        raise ValueError("exact Laurent-polynomial coefficients required")


# ---------------------------------------------------------------------------
# contexts and factorizations


@dataclass
class Factorization:
    """F = content * prod f^mult with monic irreducible f."""

    poly: MeroPoly
    content: PuiseuxSeries
    factors: list[tuple[Branch, int]] = field(default_factory=list)

    @property
    def chi(self) -> int:
        return sum(m for _, m in self.factors)

    @property
    def branches(self) -> list[Branch]:
        return [b for b, _ in self.factors]

    def flat(self) -> list[Branch]:
        return [b for b, m in self.factors for _ in range(m)]

    def multiplicity(self, b: Branch) -> int:
        for c, m in self.factors:
            if c is b:
                return m
        return 0

    @property
    def is_squarefree(self) -> bool:
        return all(m == 1 for _, m in self.factors)

    def monic_part(self) -> MeroPoly:
        acc = MeroPoly.const(1)
        for b, m in self.factors:
            acc = acc * b.poly() ** m
        return acc


class _Piece:
    __slots__ = ("poly", "branches")

    def __init__(self, poly, branches):
        self.poly = poly
        self.branches = branches
        for b in branches:
            b.piece = poly


_CTX: contextvars.ContextVar["Context"] = contextvars.ContextVar("merocurve_context")


class Context:
    """A computation context: one coefficient tower plus a coprime base.

    ``precision`` (x-units) is the initial budget every new branch is
    refined to; ``cap_factor`` bounds adaptive refinement at that multiple
    of the branch's base budget.
    """

    def __init__(self, precision=None, cap_factor: int = DEFAULT_CAP_FACTOR, tower: Tower | None = None):
        self.tower = tower or Tower()
        self.precision = Fraction(precision) if precision is not None else None
        self.cap_factor = cap_factor
        self.pieces: list[_Piece] = []
        self._cache: dict = {}
        self._tokens = []

    def __enter__(self):
        self._tokens.append((_CTX.set(self), self.tower.__enter__()))
        return self

    def __exit__(self, *exc):
        tok, _ = self._tokens.pop()
        self.tower.__exit__(*exc)
        _CTX.reset(tok)
        return False

    # -- precision -------------------------------------------------------------
    def base_budget(self, b: Branch) -> Fraction:
        tail = b._tail
        sep = Fraction(tail.L + 1, b.n) if tail is not None else Fraction(1)
        base = max(abs(sep), Fraction(1))
        if self.precision is not None:
            base = max(base, abs(self.precision))
        return base

    def cap_for(self, b: Branch) -> Fraction:
        return self.cap_factor * self.base_budget(b)

    # -- registration ------------------------------------------------------------
    def factor(self, F: MeroPoly) -> Factorization:
        _check_exact(F)
        key = F.sort_key()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if F.deg_y == 0:
            res = Factorization(F, F.coeff(0), [])
            self._cache[key] = res
            return res
        parts: list[tuple[Branch, int]] = []
        for s, k in _yun_y(F):
            rest = s
            for piece in list(self.pieces):
                if rest.deg_y <= 0:
                    break
                g = gcd_y(piece.poly, rest)
                if g.deg_y <= 0:
                    continue
                hit_piece = self._split(piece, g)
                parts.extend((b, k) for b in hit_piece.branches)
                rest = _div(rest, g)
            if rest.deg_y > 0:
                piece = self._new_piece(_normalize(rest))
                parts.extend((b, k) for b in piece.branches)
        parts.sort(key=lambda bm: bm[0].sort_key())
        res = Factorization(F, F.deco_y(), parts)
        self._cache[key] = res
        return res

    def _new_piece(self, P: MeroPoly) -> _Piece:
        branches = _expand(P, 1, {}, 0, True, self)
        if sum(b.n for b in branches) != P.deg_y:
            raise ArithmeticError("branch degrees do not add up")
        for b in branches:
            if self.precision is not None:
                b.refine_x(self.precision)
        branches.sort(key=Branch.sort_key)
        piece = _Piece(P, branches)
        self.pieces.append(piece)
        return piece

    def _split(self, piece: _Piece, g: MeroPoly) -> _Piece:
        if g.deg_y == piece.poly.deg_y:
            return piece
        h = _div(piece.poly, g)
        inside, outside = [], []
        for b in piece.branches:
            (inside if _belongs(b, g, h) else outside).append(b)
        self.pieces.remove(piece)
        a = _Piece(_normalize(g), inside)
        c = _Piece(_normalize(h), outside)
        self.pieces.extend([a, c])
        return a

    def knows(self, b: Branch, F: MeroPoly) -> bool:
        """Whether the branch divides the registered polynomial F."""
        return any(c is b for c in self.factor(F).branches)


def _belongs(b: Branch, g: MeroPoly, h: MeroPoly) -> bool:
    """Decide which of the coprime g, h vanishes at the branch."""
    while True:
        vg = b.evaluate(g)
        if vg.coeffs:
            return False
        vh = b.evaluate(h)
        if vh.coeffs:
            return True
        b.grow()


def current_context() -> Context:
    ctx = _CTX.get(None)
    if ctx is None:
        ctx = Context()
        _CTX.set(ctx)
    return ctx


# ---------------------------------------------------------------------------
# module-level API


def factor(F: MeroPoly, tau=None, ctx: Context | None = None) -> Factorization:
    ctx = ctx or current_context()
    res = ctx.factor(F)
    if tau is not None:
        for b in res.branches:
            b.refine_x(tau)
    return res


def puiseux_roots(f: MeroPoly, tau=None, ctx: Context | None = None) -> list[Branch]:
    _check_exact(f)
    lc = f.deco_y()
    if not (lc.is_exact and len(lc.coeffs) == 1 and 0 in lc.coeffs and lc.coeffs[0] == 1):
        raise NotMonic("puiseux_roots expects a monic polynomial")
    _, multiple = squarefree_part(f)
    if multiple:
        raise NotSquarefree("puiseux_roots expects a squarefree polynomial")
    return factor(f, tau, ctx).branches


def refine(b: Branch, tau) -> Branch:
    """Extend the branch so its Puiseux root is known below x-exponent tau."""
    return b.refine_x(tau)
