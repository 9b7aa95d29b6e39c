"""Contact between branches, contact sets, buds and finite strict trees.

Flowers are never materialized: membership of a branch f in the flower of a
bud B is the test noc(f, g) >= level for the stem members g.  A bud is the
pair (stem, level); the improper bud has level None (read: minus infinity).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .charseq import char_seq, deformation_values, lambda_data, strength_at
from .coeff import ONE, is_zero, pderiv, pdivmod, pgcd, pmonic, ptrim
from .errors import ConstantInput, PrecisionCapExceeded
from .meropoly import MeroPoly
from .newton import Branch, Context, Factorization, current_context
from .series import INF, EdgeTriple, PuiseuxSeries, trunc_dagger

__all__ = [
    "Bud",
    "ContactTree",
    "Friend",
    "noc",
    "contact",
    "int_branches",
    "contact_set",
    "contact_set_product",
    "build_tree",
    "tree_of",
    "tree_of_product",
    "roof",
    "preroof",
    "strict_friends",
    "d_prime",
    "d_double_prime",
    "in_tau",
    "in_tau_star",
    "in_tau_prime",
    "noc_bud",
    "verify_itp",
    "verify_gnp7",
    "radical",
]


# ---------------------------------------------------------------------------
# contact


def _grow_one(a: Branch, b: Branch):
    """Refine whichever of the two is known less far."""
    cands = [x for x in (a, b) if not x.is_exact]
    if not cands:
        raise ArithmeticError("exact roots with undetermined difference")
    cands.sort(key=lambda x: x.prec_x)
    try:
        cands[0].grow()
    except PrecisionCapExceeded:
        if len(cands) == 1:
            raise
        cands[1].grow()


def _cache(a: Branch) -> dict:
    ctx = a.ctx
    c = getattr(ctx, "_noc", None)
    if c is None:
        c = ctx._noc = {}
    return c


def _diff_orders(a: Branch, b: Branch):
    """ord_x(y_a,j - y_b) for every conjugate j of a, or None if undetermined."""
    while True:
        yb = b.puiseux()
        out = []
        for ya in a.conjugates():
            d = ya - yb
            if d.coeffs:
                out.append(d.ord_x())
            elif d.trunc == INF:
                out.append(INF)
            else:
                out = None
                break
        if out is not None:
            return out
        _grow_one(a, b)


def noc(a: Branch, b: Branch):
    """Normalized contact: the largest x-order of a difference of roots."""
    if a is b:
        return INF
    cache = _cache(a)
    key = (id(a), id(b)) if id(a) < id(b) else (id(b), id(a))
    hit = cache.get(key)
    if hit is None:
        # the entry holds both branches so their ids cannot be recycled
        hit = cache[key] = (a, b, max(_diff_orders(a, b)))
    return hit[2]


def contact(a: Branch, b: Branch):
    v = noc(a, b)
    return v if v == INF else a.n * v


def int_branches(a: Branch, b: Branch):
    """int(a, b) = ord_X b(X^n, z_a) summed from root differences."""
    if a is b:
        return INF
    return a.n * sum(_diff_orders(b, a))


# ---------------------------------------------------------------------------
# contact sets


def _distinct(bs):
    out = []
    for b in bs:
        if not any(b is c for c in out):
            out.append(b)
    return out


def _contact_values(branches) -> set:
    out = set()
    for b in branches:
        out |= char_seq(b).noninteger_c()
    for a, b in itertools.combinations(branches, 2):
        out.add(noc(a, b))
    return out


def contact_set(F: Factorization) -> set:
    return _contact_values(F.branches)


def contact_set_product(F: Factorization, G: Factorization) -> set:
    return _contact_values(_distinct(F.branches + G.branches))


# ---------------------------------------------------------------------------
# buds


@dataclass(eq=False)
class Friend:
    """A strict friend of a bud: a class of the stem under noc > level."""

    stem: tuple
    Dstar: int | None
    E: list | None

    @property
    def E0(self):
        return None if self.E is None else -self.E[0]

    @property
    def degree(self) -> int:
        return sum(b.n for b in self.stem)


@dataclass(eq=False)
class Bud:
    stem: tuple
    level: Fraction | None
    id: str = ""
    parent: "Bud | None" = None
    children: list = field(default_factory=list)

    def __post_init__(self):
        self._ld = None
        self._sample = None
        self._friends = None

    @property
    def proper(self) -> bool:
        return self.level is not None

    @property
    def rep(self) -> Branch:
        return self.stem[0]

    @property
    def stem_degree(self) -> int:
        return sum(b.n for b in self.stem)

    def data(self):
        if not self.proper:
            raise ValueError("the improper bud carries no level data")
        if self._ld is None:
            self._ld = lambda_data(self.rep, self.level)
        return self._ld

    @property
    def D(self):
        return self.data().D if self.proper else None

    @property
    def Dstar(self):
        return self.data().Dstar if self.proper else None

    @property
    def S(self):
        return self.data().S if self.proper else None

    def sample(self, k: int = 1):
        """An edge sample (zhat, V, W): zhat is the root of t(B)(X^V, .)."""
        if self._sample is None:
            ld = self.data()
            zd = trunc_dagger(ld.z, EdgeTriple(self.rep.n, ld.V, ld.W))
            self._sample = (zd, ld.V, ld.W)
        zd, V, W = self._sample
        if k == 1:
            return zd, V, W
        return zd.substitute(k), V * k, W * k

    def __repr__(self):
        lv = "-inf" if self.level is None else str(self.level)
        return f"Bud({self.id or '?'}, level={lv}, stem={[b.n for b in self.stem]})"


def in_tau(f: Branch, B: Bud) -> bool:
    if not B.proper:
        return True
    return all(noc(f, g) >= B.level for g in B.stem)


def in_tau_star(f: Branch, B: Bud) -> bool:
    if not B.proper:
        return True
    return in_tau(f, B) and any(noc(f, g) > B.level for g in B.stem)


def in_tau_prime(f: Branch, B: Bud) -> bool:
    return in_tau(f, B) and not in_tau_star(f, B)


def noc_bud(f: Branch, B: Bud):
    """noc(f, B): the level inside the flower, else the least contact with the stem."""
    if not B.proper:
        return None
    if in_tau(f, B):
        return B.level
    return min(noc(f, g) for g in B.stem)


def radical(p: list) -> list:
    """Monic squarefree part of a univariate polynomial over the tower."""
    p = ptrim(p)
    if len(p) <= 1:
        return [ONE]
    g = pgcd(p, pderiv(p))
    q, r = pdivmod(p, g)
    return pmonic(q)


def _friend_E(B: Bud, cls: tuple) -> list:
    zd, V, W = B.sample()
    _, inco = deformation_values(cls[0], zd, V, W)
    return radical(inco)


def _friends(B: Bud) -> list:
    if B._friends is not None:
        return B._friends
    if not B.proper:
        out = [Friend(B.stem, None, None)]
    else:
        classes: list[list] = []
        for f in B.stem:
            for c in classes:
                if noc(f, c[0]) > B.level:
                    c.append(f)
                    break
            else:
                classes.append([f])
        out = []
        for c in classes:
            ld = lambda_data(c[0], B.level)
            out.append(Friend(tuple(c), ld.Dstar, _friend_E(B, tuple(c))))
    B._friends = out
    return out


# ---------------------------------------------------------------------------
# trees


class ContactTree:
    def __init__(self, branches, levels, buds, root):
        self.branches = tuple(branches)
        self.levels = tuple(levels)
        self.buds = buds
        self.root = root

    def __iter__(self):
        return iter(self.buds)

    def __len__(self):
        return len(self.buds)

    def at_level(self, i: int) -> list:
        lv = None if i == 0 else self.levels[i - 1]
        return [B for B in self.buds if B.level == lv]

    def by_id(self, name: str) -> Bud:
        for B in self.buds:
            if B.id == name:
                return B
        raise KeyError(name)

    def bud_of(self, f: Branch, level) -> Bud:
        for B in self.buds:
            if B.level == level and any(g is f for g in B.stem):
                return B
        raise KeyError("no bud at that level contains the branch")

    def index(self, f: Branch) -> int:
        for i, b in enumerate(self.branches):
            if b is f:
                return i
        raise KeyError("branch not in tree")

    def check_strict(self) -> bool:
        """Every level's stems partition the branch set; children partition parents."""
        ids = sorted(id(b) for b in self.branches)
        for i in range(len(self.levels) + 1):
            got = sorted(id(b) for B in self.at_level(i) for b in B.stem)
            if got != ids:
                return False
        for B in self.buds:
            if B.children:
                got = sorted(id(b) for C in B.children for b in C.stem)
                if got != sorted(id(b) for b in B.stem):
                    return False
        return True


def _above(Bp: Bud, B: Bud) -> bool:
    if Bp is B:
        return False
    lb = -INF if B.level is None else B.level
    lp = -INF if Bp.level is None else Bp.level
    if lp <= lb:
        return False
    ids = {id(b) for b in B.stem}
    return all(id(b) in ids for b in Bp.stem)


def preroof(T: ContactTree, B: Bud) -> list:
    return [Bp for Bp in T.buds if _above(Bp, B)]


def roof(T: ContactTree, B: Bud) -> list:
    pi = preroof(T, B)
    return [Bp for Bp in pi if not any(_above(Bp, C) for C in pi)]


def _primes(k: int) -> str:
    return "'" * k


def build_tree(stems, levels) -> ContactTree:
    """The strict tree whose level-l buds are the classes of noc >= l."""
    branches = _distinct(stems)
    if not branches:
        raise ConstantInput("a tree needs at least one branch")
    levels = sorted(set(Fraction(x) for x in levels))
    root = Bud(tuple(branches), None, "B0")
    buds = [root]
    prev = [root]
    for i, lam in enumerate(levels, start=1):
        cur = []
        for P in prev:
            classes: list[list] = []
            for f in P.stem:
                for c in classes:
                    if noc(f, c[0]) >= lam:
                        c.append(f)
                        break
                else:
                    classes.append([f])
            for c in classes:
                B = Bud(tuple(c), lam, parent=P)
                P.children.append(B)
                cur.append(B)
        cur.sort(key=lambda B: (-B.stem_degree, [branches.index(b) for b in B.stem]))
        for k, B in enumerate(cur):
            B.id = f"B{i}{_primes(k)}"
        buds.extend(cur)
        prev = cur
    return ContactTree(branches, levels, buds, root)


def _factor(F, ctx: Context | None) -> Factorization:
    if isinstance(F, Factorization):
        return F
    ctx = ctx or current_context()
    return ctx.factor(F)


def tree_of(F, ctx: Context | None = None) -> ContactTree:
    fac = _factor(F, ctx)
    if not fac.branches:
        raise ConstantInput("F lies in k((X)): no branches")
    return build_tree(fac.branches, contact_set(fac))


def tree_of_product(F, G, ctx: Context | None = None) -> ContactTree:
    a, b = _factor(F, ctx), _factor(G, ctx)
    branches = _distinct(a.branches + b.branches)
    if not branches:
        raise ConstantInput("F*G lies in k((X)): no branches")
    return build_tree(branches, contact_set_product(a, b))


# ---------------------------------------------------------------------------
# friends and degree counts


def strict_friends(T: ContactTree, B: Bud) -> list:
    """R*(B) realized as the classes of the stem under noc > level."""
    return _friends(B)


def d_prime(T: ContactTree, B: Bud) -> int:
    fr = _friends(B)
    if not B.proper:
        return -1 + len(fr)
    return -B.D + sum(f.Dstar for f in fr)


def d_double_prime(T: ContactTree, B: Bud) -> int:
    tot = B.stem_degree
    return -(B.D if B.proper else 1) + tot


# ---------------------------------------------------------------------------
# checks


def verify_itp(f: Branch, g: Branch, h: Branch) -> bool:
    a, b, c = noc(f, g), noc(g, h), noc(f, h)
    if c < min(a, b):
        return False
    if a != b and c != min(a, b):
        return False
    return True


def verify_gnp7(f: Branch, g: Branch) -> bool:
    lam = noc(f, g)
    if lam == INF:
        return True
    want = strength_at(f, lam) * g.n * f.n
    return int_branches(f, g) == want
