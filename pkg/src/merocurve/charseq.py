"""Characteristic sequences of a branch and the objects attached to a level.

For a branch f of degree n with root z(X) of f(X^n, Y) the sequences are

    m_0 = n,  m_1 = min Supp z,  m_i = min(Supp z minus d_i Z),
    d_0 = 0,  d_i = gcd(m_0, ..., m_{i-1}),
    q_0 = n,  q_1 = m_1,  q_i = m_i - m_{i-1},
    s_i = q_1 d_1 + ... + q_i d_i  (s_0 = n),  r_i = s_i / d_i  (r_0 = n),
    c_i = m_i / n.

``d`` is stored up to d_{h+1} = 1.  A level lambda then selects the
positions p, p*, degrees D, D*, the strength S, the constants A, Â, the
polynomials E, Ê and the open/closed truncations t, t*.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .coeff import ONE, ZERO, as_field, fpow, is_zero, pmul, ptrim
from .errors import NotOnEdge, PrecisionCapExceeded
from .meropoly import MeroPoly, compose_deformation
from .newton import Branch
from .series import INF, EdgeTriple, PuiseuxSeries, edge_contains, trunc_dagger

__all__ = [
    "CharSeq",
    "LambdaData",
    "char_seq",
    "lambda_data",
    "edge_sample",
    "np7_values",
    "verify_np7",
    "truncation_branch",
    "deformation_values",
    "strength_at",
]


@dataclass(frozen=True)
class CharSeq:
    n: int
    h: int
    m: tuple
    d: tuple
    q: tuple
    s: tuple
    r: tuple
    c: tuple

    def noninteger_c(self) -> set:
        return {c for c in self.c if c.denominator != 1}


def _exponent_outside(b: Branch, d: int, after: int):
    """Least support exponent of the root not divisible by d (refining)."""
    while True:
        z = b.root
        for i in sorted(z.coeffs):
            if i > after and i % d:
                return i
        if b.is_exact:
            raise ArithmeticError("root support stays in dZ: branch is not irreducible")
        b.grow()


def _first_exponent(b: Branch):
    while True:
        z = b.root
        if z.coeffs:
            return min(z.coeffs)
        if b.is_exact:
            return None
        b.grow()


def char_seq(b: Branch) -> CharSeq:
    hit = getattr(b, "_charseq", None)
    if hit is None:
        hit = b._charseq = _char_seq(b)
    return hit


def _char_seq(b: Branch) -> CharSeq:
    n = b.n
    m1 = _first_exponent(b)
    if m1 is None:
        return CharSeq(n, 0, (n,), (0, 1), (n,), (n,), (n,), ())
    m = [n, m1]
    d = [0, n]
    while True:
        g = math.gcd(d[-1], m[-1])
        d.append(g)
        if g == 1:
            break
        m.append(_exponent_outside(b, g, m[-1]))
    h = len(m) - 1
    q = [n, m[1]] + [m[i] - m[i - 1] for i in range(2, h + 1)]
    s = [n]
    acc = 0
    for i in range(1, h + 1):
        acc += q[i] * d[i]
        s.append(acc)
    r = [n] + [s[i] // d[i] for i in range(1, h + 1)]
    c = tuple(Fraction(m[i], n) for i in range(1, h + 1))
    return CharSeq(n, h, tuple(m), tuple(d), tuple(q), tuple(s), tuple(r), c)


@dataclass
class LambdaData:
    lam: Fraction
    n: int
    p: int
    pstar: int
    D: int
    Dstar: int
    S: Fraction
    A: object
    Ahat: object
    E0: object
    z: PuiseuxSeries
    t: Branch
    tstar: Branch
    V: int
    W: int

    @property
    def E(self) -> list:
        """E(Y) = Y^(D*/D) - E0 as a coefficient list."""
        k = self.Dstar // self.D
        return ptrim([-self.E0] + [ZERO] * (k - 1) + [ONE])

    @property
    def Ehat(self) -> list:
        out = [ONE]
        for _ in range(self.n // self.Dstar):
            out = pmul(out, self.E)
        return out

    @property
    def triple(self) -> EdgeTriple:
        return EdgeTriple(self.n, self.V, self.W)

    def sample(self, k: int = 1):
        """The k-th edge sample (z, U, V, W) with V scaled by k."""
        return (self.z, self.n, self.V * k, self.W * k)


def _position(cs: CharSeq, lam, strict: bool) -> int:
    p = 0
    for c in cs.c:
        if c < lam or (strict and c == lam):
            p += 1
    return p


def _coeff(z: PuiseuxSeries, e):
    return z.coeff_at(e) if (Fraction(e) * z.ram).denominator == 1 else ZERO


def lambda_data(b: Branch, lam, cs: CharSeq | None = None, z: PuiseuxSeries | None = None) -> LambdaData:
    """Level data of the branch at ``lam`` for the root ``z`` (default: b.root)."""
    lam = Fraction(lam)
    cs = cs or char_seq(b)
    n = b.n
    p = _position(cs, lam, False)
    ps = _position(cs, lam, True)
    D = n // cs.d[p + 1]
    Ds = n // cs.d[ps + 1]
    if p == 0:
        S = lam
    else:
        S = (cs.s[p] + (n * lam - cs.m[p]) * cs.d[p + 1]) / Fraction(n * n)
    _ensure(b, n * lam)
    z = z if z is not None else b.root
    A = ONE
    for i in range(1, p + 1):
        k = cs.d[i] // cs.d[i + 1]
        base = k * fpow(_coeff(z, cs.m[i]), k - 1)
        A = A * fpow(base, cs.d[i + 1] * D // n)
    Ahat = fpow(A, n // D)
    E0 = fpow(_coeff(z, n * lam), Ds // D)
    V = math.lcm(lam.denominator, D)
    W = int(lam * V)
    t = truncation_branch(b, lam, False, z)
    ts = truncation_branch(b, lam, True, z)
    return LambdaData(lam, n, p, ps, D, Ds, S, A, Ahat, E0, z, t, ts, V, W)


def strength_at(b: Branch, lam, cs: CharSeq | None = None) -> Fraction:
    """S(f, lam) alone, without the rest of the level data."""
    lam = Fraction(lam)
    cs = cs or char_seq(b)
    p = _position(cs, lam, False)
    if p == 0:
        return lam
    n = b.n
    return (cs.s[p] + (n * lam - cs.m[p]) * cs.d[p + 1]) / Fraction(n * n)


def _ensure(b: Branch, e):
    """Refine until the root is known at exponent e (inclusive)."""
    while not b.is_exact and b.prec <= e:
        b.grow()


def truncation_branch(b: Branch, lam, strict: bool, z: PuiseuxSeries | None = None) -> Branch:
    """t(f, lam) (or t* when strict) as an exact branch."""
    lam = Fraction(lam)
    _ensure(b, b.n * lam)
    z = z if z is not None else b.root
    cut = b.n * lam
    keep = {i: c for i, c in z.coeffs.items() if (i <= cut if strict else i < cut)}
    y = PuiseuxSeries(keep, b.n)  # the truncated Puiseux root in x
    D = y.ram
    root = PuiseuxSeries(dict(y.coeffs), 1)
    return Branch(D, root, b.ctx)


def edge_sample(b: Branch, lam, cs: CharSeq | None = None):
    ld = lambda_data(b, lam, cs)
    return ld.sample()


# ---------------------------------------------------------------------------
# the deformation at an edge


def _series_in(z: PuiseuxSeries, V: int, n: int, j: int, zeta):
    """z(zeta^j X^(V/n)) for z a root in its own variable."""
    coeffs = {}
    for i, c in z.coeffs.items():
        coeffs[i] = c * fpow(zeta, (i * j) % n) if j else c
    trunc = INF if z.trunc == INF else z.trunc * Fraction(V, n)
    return PuiseuxSeries(coeffs, 1, INF).substitute(Fraction(V, n)).truncate(trunc)


def deformation_values(b: Branch, zd: PuiseuxSeries, V: int, W: int):
    """ord_X and inco_X of f(X^V, zd + X^W Y), as a product over conjugate roots."""
    from .coeff import primitive_root_of_unity

    n = b.n
    while not b.is_exact and Fraction(b.prec) * Fraction(V, n) <= W:
        b.grow()
    zeta = primitive_root_of_unity(n, b.ctx.tower) if n > 1 else ONE
    total = Fraction(0)
    inco = [ONE]
    for j in range(n):
        diff = zd - _series_in(b.root, V, n, j, zeta)
        low = min(diff.coeffs) / Fraction(diff.ram) if diff.coeffs else INF
        if low < W:
            total += low
            c = diff.coeffs[min(diff.coeffs)]
            inco = [x * c for x in inco]
        elif low == W:
            total += W
            inco = pmul(inco, [diff.coeffs[min(diff.coeffs)], ONE])
        else:
            if diff.trunc <= W:
                raise PrecisionCapExceeded("root not known past the edge")
            total += W
            inco = pmul(inco, [ZERO, ONE])
    return total, ptrim(inco)


def _root_product_values(b: Branch, sample):
    z, U, V, W = sample
    return deformation_values(b, trunc_dagger(z, EdgeTriple(U, V, W)), V, W)


def _exact_values(b: Branch, sample):
    """Same through exact composition, when f itself is exact."""
    pc = b.piece
    if pc is None or pc.deg_y != b.n:
        return None
    z, U, V, W = sample
    g = compose_deformation(pc, z, EdgeTriple(U, V, W))
    lc = pc.deco_y().substitute(V)
    o = g.ord_x() - lc.ord_x()
    c = lc.coeffs[min(lc.coeffs)]
    from .coeff import inv

    ic = inv(c)
    return o, [x * ic for x in g.inco_x()]


def np7_values(b: Branch, sample, route: str = "roots"):
    if route == "exact":
        return _exact_values(b, sample)
    return _root_product_values(b, sample)


def verify_np7(b: Branch, lam, sample=None) -> bool:
    lam = Fraction(lam)
    z, U, V, W = sample if sample is not None else lambda_data(b, lam).sample()
    if U != b.n or Fraction(W, V) != lam:
        raise NotOnEdge("sample is not on the lambda-edge of the branch")
    if not edge_contains(z, EdgeTriple(U, V, W)):
        raise NotOnEdge("sample triple is not on the edge of z")
    ld = lambda_data(b, lam, z=z)
    want_ord = ld.S * b.n * V
    want = ptrim([ld.Ahat * x for x in ld.Ehat])
    ok = True
    for route in ("roots", "exact"):
        got = np7_values(b, (z, U, V, W), route)
        if got is None:
            continue
        o, inco = got
        ok = ok and o == want_ord and len(inco) == len(want) and all(
            is_zero(a - c) for a, c in zip(inco, want)
        )
    return ok
