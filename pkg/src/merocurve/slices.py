"""Slices of a factored H along the buds of a contact tree.

A slice is kept as a list of factor indices of H (with repetition for
multiplicity); polynomials are only multiplied out for reports.  The
derivative and jacobian factorizations compare the slice degrees of F_Y,
J(F, G) or (FG)_Y with the primitive degrees D'(B) and D''(B) of the tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .charseq import deformation_values, lambda_data, strength_at
from .coeff import ONE, ZERO, fpow, inv, is_zero, pdivmod, pgcd, pmonic, pmul, ptrim
from .contact_tree import (
    Bud,
    ContactTree,
    d_double_prime,
    d_prime,
    in_tau,
    in_tau_prime,
    in_tau_star,
    int_branches,
    noc,
    noc_bud,
    preroof,
    radical,
    roof,
    strict_friends,
    tree_of,
    tree_of_product,
)
from .errors import ConstantInput, MultipleFactors, NotOnEdge, ZeroArgument, ZeroG
from .meropoly import MeroPoly, jacobian
from .newton import Branch, Factorization, current_context, squarefree_part
from .series import INF, PuiseuxSeries

__all__ = [
    "SliceAssignment",
    "SliceEntry",
    "FactorizationReport",
    "Verdict",
    "assign_slices",
    "minco",
    "minco_factored",
    "sinco",
    "pinco",
    "split_inco",
    "strength",
    "doubly_strict",
    "friend_bud",
    "derivative_factorization",
    "jacobian_factorization",
    "verify_sp_lemmas",
]


# ---------------------------------------------------------------------------
# assignment


@dataclass
class SliceAssignment:
    H: Factorization
    tree: ContactTree
    omega: dict = field(default_factory=dict)
    omega_prime: dict = field(default_factory=dict)
    omega_star: dict = field(default_factory=dict)
    omega_TB: dict = field(default_factory=dict)
    omega_star_TB: dict = field(default_factory=dict)
    omega_star_pair: dict = field(default_factory=dict)

    def degree(self, idx) -> int:
        return sum(self.H.factors[j][0].n * self.H.factors[j][1] for j in idx)

    def deg(self, table: str, key) -> int:
        return self.degree(getattr(self, table)[key])

    def product(self, idx) -> MeroPoly:
        acc = MeroPoly.const(1)
        for j in idx:
            b, m = self.H.factors[j]
            acc = acc * b.poly() ** m
        return acc

    def check(self) -> bool:
        """Disjointness and partition identities of the assignment."""
        T = self.tree
        ok = True
        for B in T:
            k = B.id
            om, op, os_ = set(self.omega[k]), set(self.omega_prime[k]), set(self.omega_star[k])
            ok &= om == op | os_ and not op & os_
            tb, stb = set(self.omega_TB[k]), set(self.omega_star_TB[k])
            ok &= tb == op | stb and not op & stb
            rest = set()
            for C in roof(T, B):
                sub = set(self.omega[C.id])
                ok &= not rest & sub
                rest |= sub
            ok &= om == tb | rest and not tb & rest
            pairs = set()
            for C in roof(T, B):
                sub = set(self.omega_star_pair[(C.id, k)])
                ok &= not pairs & sub
                pairs |= sub
            if roof(T, B):
                ok &= stb == pairs
        every = set()
        for B in T:
            part = set(self.omega_TB[B.id])
            ok &= not every & part
            every |= part
        ok &= every == set(range(len(self.H.factors)))
        return bool(ok)


def friend_bud(stem, level) -> Bud:
    return Bud(tuple(stem), level)


def assign_slices(H: Factorization, T: ContactTree) -> SliceAssignment:
    A = SliceAssignment(H, T)
    idx = range(len(H.factors))
    fs = [b for b, _ in H.factors]
    for B in T:
        k = B.id
        A.omega[k] = [j for j in idx if in_tau(fs[j], B)]
        A.omega_star[k] = [j for j in A.omega[k] if in_tau_star(fs[j], B)]
        A.omega_prime[k] = [j for j in A.omega[k] if j not in A.omega_star[k]]
    for B in T:
        k = B.id
        above = set()
        for C in roof(T, B):
            above |= set(A.omega[C.id])
        A.omega_TB[k] = [j for j in A.omega[k] if j not in above]
        A.omega_star_TB[k] = [j for j in A.omega_TB[k] if j not in A.omega_prime[k]]
        for C in roof(T, B):
            R = friend_bud(C.stem, B.level)
            A.omega_star_pair[(C.id, k)] = [
                j for j in idx if in_tau_star(fs[j], R) and not in_tau(fs[j], C)
            ]
    return A


# ---------------------------------------------------------------------------
# initial coefficients at an edge


def minco(H: MeroPoly, zd: PuiseuxSeries, V: int, W: int):
    """(ord_X, inco_X) of H(X^V, zd + X^W Y), by exact substitution."""
    sub = MeroPoly({0: zd, 1: PuiseuxSeries.monomial(1, W)})
    G = H.substitute_x(V).compose_y(sub)
    if G.is_zero():
        return INF, []
    return G.ord_x(), G.inco_x()


def minco_factored(H: Factorization, zd: PuiseuxSeries, V: int, W: int, only=None):
    """Same value assembled from the content and the branch factors."""
    c = H.content
    if not c.coeffs:
        return INF, []
    e, lead = c.lead()
    total = e * V
    inco = [lead]
    for j, (b, m) in enumerate(H.factors):
        if only is not None and j not in only:
            continue
        o, p = deformation_values(b, zd, V, W)
        for _ in range(m):
            total += o
            inco = pmul(inco, p)
    return total, ptrim(inco)


def _stem_poly(B: Bud) -> list:
    acc = [ONE]
    for fr in strict_friends(None, B):
        acc = pmul(acc, fr.E)
    return acc


def split_inco(inco: list, B: Bud):
    """(sinco, pinco): monic parts of inco with roots killed / not killed by the stem."""
    inco = ptrim(inco)
    if not inco:
        return [ONE], [ONE]
    P = radical(_stem_poly(B))
    rest = pmonic(inco)
    s = [ONE]
    while len(rest) > 1:
        g = pgcd(rest, P)
        if len(g) <= 1:
            break
        s = pmul(s, g)
        rest, r = pdivmod(rest, g)
        if r:
            raise ArithmeticError("inexact division in root splitting")
    return pmonic(s), pmonic(rest)


def sinco(H: MeroPoly, B: Bud, sample=None) -> list:
    zd, V, W = sample or B.sample()
    return split_inco(minco(H, zd, V, W)[1], B)[0]


def pinco(H: MeroPoly, B: Bud, sample=None) -> list:
    zd, V, W = sample or B.sample()
    return split_inco(minco(H, zd, V, W)[1], B)[1]


# ---------------------------------------------------------------------------
# strengths and doubly strict data


def _as_fac(H) -> Factorization:
    if isinstance(H, Factorization):
        return H
    return current_context().factor(H)


def _ord_improper(b: Branch) -> int:
    from .charseq import char_seq

    m = char_seq(b).m
    return min(0, m[1]) if len(m) > 1 else 0


def strength(H, B: Bud) -> Fraction:
    """S(H, B); raises ZeroArgument for H = 0."""
    if isinstance(H, MeroPoly) and H.is_zero():
        raise ZeroArgument("the strength of 0 is infinite")
    Hf = _as_fac(H)
    if not Hf.content.coeffs:
        raise ZeroArgument("the strength of 0 is infinite")
    out = Fraction(Hf.content.ord_x())
    for b, m in Hf.factors:
        if B.proper:
            out += m * b.n * strength_at(b, noc_bud(b, B))
        else:
            out += m * _ord_improper(b)
    return out


def _aligned_root(h: Branch, B: Bud) -> PuiseuxSeries:
    """The conjugate root of h closest to the bud's representative (own variable)."""
    yr = B.rep.puiseux()
    best, bj = None, 0
    for j in range(h.n):
        d = h.conjugate(j) - yr
        o = d.valuation_bound()
        if best is None or o > best:
            best, bj = o, j
    y = h.conjugate(bj)
    return PuiseuxSeries(dict(y.coeffs), 1, h.prec)


def doubly_strict(H, B: Bud):
    """(A**, D**) of H at a strict bud B.

    Each factor contributes A(R*(H_j, B))^(n_j/D(B)), the constant its own
    initial coefficient carries at the edge.
    """
    Hf = _as_fac(H)
    A = ONE
    deg = 0
    for b, m in Hf.factors:
        if not in_tau_star(b, B):
            continue
        lam = noc_bud(b, B)
        ld = lambda_data(b, lam, z=_aligned_root(b, B))
        A = A * fpow(ld.A, m * b.n // ld.D)
        deg += b.n * m
    return A, deg // B.Dstar


# ---------------------------------------------------------------------------
# reports


@dataclass
class Verdict:
    name: str
    where: str
    ok: bool | None  # None: skipped
    detail: str = ""

    def line(self) -> str:
        tag = "SKIP" if self.ok is None else ("PASS" if self.ok else "FAIL")
        return f"{tag} {self.name} [{self.where}] {self.detail}".rstrip()


@dataclass
class SliceEntry:
    bud: Bud
    prime: list
    degree: int
    omega_degree: int
    predicted: bool
    Dprime: int
    Ddprime: int
    intersections: list  # (stem index, int, n*S(B)*deg)


@dataclass
class FactorizationReport:
    kind: str
    F: MeroPoly
    G: MeroPoly | None
    H: MeroPoly
    Ffac: Factorization
    Gfac: Factorization | None
    Hfac: Factorization
    tree: ContactTree
    assignment: SliceAssignment
    entries: list
    verdicts: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v.ok is not False for v in self.verdicts)


def _check_F(F: MeroPoly):
    if F.deg_y <= 0:
        raise ConstantInput("F lies in k((X))")
    _, multiple = squarefree_part(F)
    if multiple:
        raise MultipleFactors("F has multiple factors")


def _intersections(A: SliceAssignment, B: Bud, idx) -> list:
    T = A.tree
    deg = A.degree(idx)
    out = []
    for f in B.stem:
        if not B.proper:
            break
        got = sum(m * int_branches(f, A.H.factors[j][0]) for j in idx for m in [A.H.factors[j][1]])
        out.append((T.index(f), got, f.n * B.S * deg))
    return out


def _entries(A: SliceAssignment, predicted) -> list:
    T = A.tree
    out = []
    for B in T:
        idx = A.omega_prime[B.id]
        out.append(
            SliceEntry(
                B,
                idx,
                A.degree(idx),
                A.deg("omega", B.id),
                predicted(B),
                d_prime(T, B),
                d_double_prime(T, B),
                _intersections(A, B, idx),
            )
        )
    return out


def _predict_verdicts(A: SliceAssignment, entries, name: str) -> list:
    T = A.tree
    vs = []
    for e in entries:
        B = e.bud
        if not e.predicted:
            vs.append(Verdict(name, B.id, None, "hypothesis not met"))
            continue
        vs.append(Verdict(f"{name}.deg", B.id, e.omega_degree == e.Ddprime,
                          f"deg Omega={e.omega_degree} D''={e.Ddprime}"))
        vs.append(Verdict(f"{name}.deg'", B.id, e.degree == e.Dprime,
                          f"deg Omega'={e.degree} D'={e.Dprime}"))
        rhs = list(A.omega_prime[B.id])
        for C in preroof(T, B):
            rhs += A.omega_prime[C.id]
        vs.append(Verdict(f"{name}.prod", B.id, sorted(rhs) == sorted(A.omega[B.id])))
    for e in entries:
        for i, got, want in e.intersections:
            vs.append(Verdict("int", f"{e.bud.id}:f{i}", got == want, f"int={got} nSdeg={want}"))
    return vs


def derivative_factorization(F: MeroPoly, ctx=None) -> FactorizationReport:
    ctx = ctx or current_context()
    _check_F(F)
    Ffac = ctx.factor(F)
    T = tree_of(Ffac)
    H = F.partial_y()
    Hfac = ctx.factor(H)
    A = assign_slices(Hfac, T)
    entries = _entries(A, lambda B: True)
    vs = _predict_verdicts(A, entries, "dslice")
    union = []
    for B in T:
        if B is not T.root:
            union += A.omega_prime[B.id]
    vs.append(Verdict("slice-cover", "T", sorted(union) == list(range(len(Hfac.factors)))))
    vs.append(Verdict("slices", "T", A.check()))
    return FactorizationReport("dfactor", F, None, H, Ffac, None, Hfac, T, A, entries, vs)


def jacobian_factorization(F: MeroPoly, G: MeroPoly, mode: str = "jacobian", ctx=None) -> FactorizationReport:
    """Slices of H = J(F, G) (mode 'jacobian') or H = (FG)_Y (mode 'product')."""
    ctx = ctx or current_context()
    if G.is_zero():
        raise ZeroG("G must be nonzero")
    _check_F(F)
    Ffac, Gfac = ctx.factor(F), ctx.factor(G)
    T = tree_of_product(Ffac, Gfac)
    if mode == "jacobian":
        H = jacobian(F, G)
    elif mode == "product":
        H = (F * G).partial_y()
    else:
        raise ValueError(f"unknown mode {mode!r}")
    Hfac = ctx.factor(H) if not H.is_zero() else None
    if Hfac is None:
        raise ZeroArgument("the jacobian vanishes")
    A = assign_slices(Hfac, T)

    def predicted(B):
        if any(in_tau(b, B) for b in Gfac.branches):
            return False
        return mode == "product" or strength(Gfac, B) != 0

    entries = _entries(A, predicted)
    vs = _predict_verdicts(A, entries, "jslice" if mode == "jacobian" else "pslice")
    vs.append(Verdict("slices", "T", A.check()))
    return FactorizationReport("jfactor", F, G, H, Ffac, Gfac, Hfac, T, A, entries, vs)


# ---------------------------------------------------------------------------
# lemma checks


def _scalar(p: list, q: list):
    """mu with p = mu * q, or None."""
    p, q = ptrim(p), ptrim(q)
    if len(p) != len(q) or not q:
        return None
    mu = p[-1] * inv(q[-1])
    if all(is_zero(a - mu * b) for a, b in zip(p, q)):
        return mu
    return None


def _omega_deg(Hf: Factorization, B: Bud, which: str) -> int:
    tests = {"all": in_tau, "prime": in_tau_prime, "star": in_tau_star}[which]
    return sum(b.n * m for b, m in Hf.factors if tests(b, B))


def _full_friends(Ff: Factorization, B: Bud) -> bool:
    """R*(F, B) = R*(B)."""
    for fr in strict_friends(None, B):
        R = friend_bud(fr.stem, B.level)
        if not any(in_tau_star(b, R) for b in Ff.branches):
            return False
    return True


def verify_sp_lemmas(F: MeroPoly, G: MeroPoly | None = None, T: ContactTree | None = None, ctx=None) -> list:
    ctx = ctx or current_context()
    Ff = ctx.factor(F)
    FY = F.partial_y()
    FYf = ctx.factor(FY)
    Gf = ctx.factor(G) if G is not None else None
    if T is None:
        T = tree_of(Ff) if Gf is None else tree_of_product(Ff, Gf)
    out = []
    for B in T:
        where = B.id
        # D'' = D' + sum over the preroof
        lhs = d_double_prime(T, B)
        rhs = d_prime(T, B) + sum(d_prime(T, C) for C in preroof(T, B))
        out.append(Verdict("dd-prime-sum", where, lhs == rhs, f"{lhs} vs {rhs}"))
        for name, Hf in (("F", Ff), ("F_Y", FYf)):
            A = assign_slices(Hf, T)
            prod = sorted(A.omega_prime[B.id] + [j for C in preroof(T, B) for j in A.omega_prime[C.id]])
            degs = A.deg("omega", B.id) == A.degree(prod)
            out.append(Verdict("degree-product", f"{where}:{name}", degs == (prod == sorted(A.omega[B.id]))))
        if not B.proper:
            continue
        zd, V, W = B.sample()
        D = B.D
        for name, H, Hf in (("F", F, Ff), ("F_Y", FY, FYf)):
            if H.is_zero():
                continue
            o, inco = minco(H, zd, V, W)
            o2, inco2 = minco_factored(Hf, zd, V, W)
            S = strength(Hf, B)
            out.append(Verdict("strength-order", f"{where}:{name}", o == V * S and o2 == o, f"ord={o} VS={V * S}"))
            out.append(Verdict("minco-routes", f"{where}:{name}", _scalar(inco, inco2) == 1))
            s, p = split_inco(inco, B)
            dd = len(ptrim(inco)) - 1
            ok = (
                _omega_deg(Hf, B, "all") == _omega_deg(Hf, B, "prime") + _omega_deg(Hf, B, "star")
                and _omega_deg(Hf, B, "prime") == D * (len(p) - 1)
                and _omega_deg(Hf, B, "star") == D * (len(s) - 1)
                and dd == len(p) + len(s) - 2
                and _omega_deg(Hf, B, "all") == D * dd
            )
            out.append(Verdict("degree-bookkeeping", f"{where}:{name}", ok))
        if _full_friends(Ff, B):
            dF = _omega_deg(Ff, B, "all")
            ok = (
                _omega_deg(FYf, B, "all") == dF - D
                and _omega_deg(FYf, B, "prime") == d_prime(T, B)
                and _omega_deg(FYf, B, "star") == dF - D - d_prime(T, B)
            )
            mF = len(ptrim(minco(F, zd, V, W)[1])) - 1
            incoY = minco(FY, zd, V, W)[1]
            s, p = split_inco(incoY, B)
            ok = ok and len(ptrim(incoY)) - 1 == mF - 1
            ok = ok and (len(p) - 1) * D == d_prime(T, B)
            ok = ok and len(s) - 1 == mF - 1 - Fraction(d_prime(T, B), D)
            out.append(Verdict("derivative-slice", where, ok))
        else:
            out.append(Verdict("derivative-slice", where, None, "R*(F,B) != R*(B)"))
        for fr in strict_friends(T, B):
            R = friend_bud(fr.stem, B.level)
            a, dF = doubly_strict(Ff, R)
            if dF > 0:
                _, dY = doubly_strict(FYf, R)
                out.append(Verdict("doubly-strict-drop", f"{where}:{T.index(fr.stem[0])}", dY == dF - 1, f"{dF}->{dY}"))
                # minco of the strict slice against A** E^D**
                idx = [j for j, (b, _) in enumerate(Ff.factors) if in_tau_star(b, R)]
                _, got = minco_factored(Factorization(F, PuiseuxSeries.const(1), Ff.factors), zd, V, W, only=idx)
                want = [a]
                for _ in range(dF):
                    want = pmul(want, fr.E)
                out.append(Verdict("doubly-strict-minco", f"{where}:{T.index(fr.stem[0])}", _scalar(got, want) == 1))
        if Gf is not None:
            out.extend(_transfer(F, G, Ff, Gf, FY, FYf, B, zd, V, W))
    return out


def _transfer(F, G, Ff, Gf, FY, FYf, B, zd, V, W) -> list:
    out = []
    where = B.id
    if not any(in_tau(b, B) for b in Ff.branches):
        return [Verdict("jacobian-transfer", where, None, "Omega_B(F) = 1")]
    if any(in_tau(b, B) for b in Gf.branches):
        return [Verdict("jacobian-transfer", where, None, "Omega_B(G) != 1")]
    ctx = current_context()
    _, iY = minco(FY, zd, V, W)
    sY, pY = split_inco(iY, B)
    cases = [("product-transfer", (F * G).partial_y())]
    if strength(Gf, B) != 0:
        cases.insert(0, ("jacobian-transfer", jacobian(F, G)))
    else:
        out.append(Verdict("jacobian-transfer", where, None, "S(G,B) = 0"))
    for name, H in cases:
        Hf = ctx.factor(H)
        _, iH = minco(H, zd, V, W)
        mu = _scalar(iH, iY)
        sH, pH = split_inco(iH, B)
        ok = mu is not None and not is_zero(mu) and sH == sY and pH == pY
        for w in ("all", "prime", "star"):
            ok = ok and _omega_deg(Hf, B, w) == _omega_deg(FYf, B, w)
        out.append(Verdict(name, where, ok, f"mu={mu}"))
    return out
