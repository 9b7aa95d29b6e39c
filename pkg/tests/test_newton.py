import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from merocurve import Context, MeroPoly, parse
from merocurve.coeff import is_zero
from merocurve.errors import ConstantInput, NotMonic, NotSquarefree, PrecisionCapExceeded, ZeroPolynomial
from merocurve.families import sample_family, vanishes_mod_budget
from merocurve.newton import factor, newton_polygon, puiseux_roots, refine, squarefree_part
from merocurve.series import INF

F = Fraction


def test_polygon_cusp():
    (face,) = newton_polygon(parse("Y^4 + X^5"))
    assert face.slope == F(-5, 4) and face.length == 4
    assert [c for c in face.poly] == [1, 0, 0, 0, 1]


def test_polygon_quartic_single_face():
    (face,) = newton_polygon(parse("(Y^2 - X^3)^2 - X^5*Y"))
    assert face.slope == F(-3, 2) and face.length == 4
    assert list(face.poly) == [1, 0, -2, 0, 1]


def test_polygon_trivial():
    (face,) = newton_polygon(parse("Y"))
    assert face.length in (0, 1)
    with pytest.raises(ZeroPolynomial):
        newton_polygon(MeroPoly())


def test_cusp_root_exact(ctx):
    (b,) = puiseux_roots(parse("Y^4 + X^5"))
    assert b.n == 4 and b.is_exact
    (e, k), = b.root.terms()
    assert e == 5 and k ** 4 == -1


def test_quartic_root(ctx):
    (b,) = puiseux_roots(parse("(Y^2 - X^3)^2 - X^5*Y"), F(2))
    z = b.root
    assert b.n == 4
    assert z.coeff_at(6) == 1 and z.coeff_at(7) == F(1, 2)


def test_binomial_roots(ctx):
    bs = puiseux_roots(parse("Y^2 - X^2*(1 + X)"), 4)
    assert [b.n for b in bs] == [1, 1]
    want = {1: F(1), 2: F(1, 2), 3: F(-1, 8)}
    signs = set()
    for b in bs:
        s = b.root.coeff_at(1)
        signs.add(s)
        for e, c in want.items():
            assert b.root.coeff_at(e) == s * c
        # cross-check by squaring
        assert vanishes_mod_budget(MeroPoly({0: b.evaluate(parse("Y^2 - X^2*(1 + X)"))}))
    assert signs == {1, -1}


def test_squarefree_part():
    sq, mult = squarefree_part(parse("(Y - X)^2*(Y + X)"))
    assert sq == parse("(Y - X)*(Y + X)") and mult
    sq, mult = squarefree_part(parse("Y^4 + X^5"))
    assert sq == parse("Y^4 + X^5") and not mult
    sq, mult = squarefree_part(parse("Y^2"))
    assert sq == parse("Y") and mult
    with pytest.raises(ConstantInput):
        squarefree_part(parse("X^2 + 1"))


def test_puiseux_errors(ctx):
    with pytest.raises(NotMonic):
        puiseux_roots(parse("X*Y + 1"))
    with pytest.raises(NotSquarefree):
        puiseux_roots(parse("(Y - X)^2"))


def test_factor_quintic(ctx):
    fac = factor(parse("Y^5 + X^(-1)*Y^3 + Y + 1"))
    assert fac.chi == 2 and sorted(b.n for b in fac.branches) == [2, 3]


def test_factor_content(ctx):
    fac = factor(parse("X*Y"))
    assert fac.content.ord_x() == 1 and fac.chi == 1 and fac.branches[0].n == 1


def test_factor_hat_case(ctx):
    fac = factor(parse("Y^5 + X^(-1)*Y^3 + Y"))
    assert fac.chi == 3 and sorted(b.n for b in fac.branches) == [1, 2, 2]


def test_factor_multiplicity(ctx):
    fac = factor(parse("(Y - X)^2*(Y^2 + X^3)"))
    assert sorted((b.n, m) for b, m in fac.factors) == [(1, 2), (2, 1)]
    assert fac.chi == 3 and len(fac.flat()) == 3


def test_refine_keeps_coefficients(ctx):
    (b,) = puiseux_roots(parse("(Y^2 - X^3)^2 - X^5*Y"))
    before = dict(b.root.coeffs)
    refine(b, 3)
    assert b.prec_x >= 3
    for i, c in before.items():
        assert b.root.coeffs[i] == c
    assert b.root.coeff_at(7) == F(1, 2)


def test_refine_exact_identity(ctx):
    (b,) = puiseux_roots(parse("Y^4 + X^5"))
    assert refine(b, 100) is b and b.is_exact


def test_refine_quintic_self_check(ctx):
    fac = factor(parse("Y^5 + X^(-1)*Y^3 + Y + 1"))
    b = max(fac.branches, key=lambda b: b.n)
    p0 = b.prec_x
    refine(b, p0 + 1)
    assert b.prec_x >= p0 + 1
    assert vanishes_mod_budget(MeroPoly({0: b.evaluate(parse("Y^5 + X^(-1)*Y^3 + Y + 1"))}))


def test_precision_cap():
    with Context(cap_factor=1):
        (b,) = puiseux_roots(parse("(Y^2 - X^3)^2 - X^5*Y"))
        with pytest.raises(PrecisionCapExceeded):
            refine(b, 1000)


def test_canonical_order_deterministic():
    outs = []
    for _ in range(2):
        with Context() as c:
            fac = c.factor(parse("(Y^2 - 2*X^3)*(Y - X)*(Y + X^2)"))
            outs.append([(b.n, b.sort_key()) for b in fac.branches])
    assert outs[0] == outs[1]
    assert [n for n, _ in outs[0]] == sorted(n for n, _ in outs[0])


@given(st.sampled_from(["tr3", "tr4", "tr5"]), st.integers(0, 10_000))
def test_roundtrip(fam, seed):
    F_, _ = sample_family(fam, random.Random(seed))
    with Context() as c:
        fac = c.factor(F_)
        assert sum(b.n * m for b, m in fac.factors) == F_.deg_y
        rebuilt = fac.monic_part() * MeroPoly({0: fac.content})
        assert vanishes_mod_budget(rebuilt - F_)
        for b in fac.branches:
            # support gcd chain reaches 1
            g = b.n
            for i in b.root.coeffs:
                g = __import__("math").gcd(g, i)
            assert g == 1 or b.n == 1


@given(st.lists(st.tuples(st.integers(-2, 3), st.integers(0, 3), st.integers(-2, 2).filter(bool)), min_size=1, max_size=4))
def test_squarefree_idempotent(terms):
    G = MeroPoly.from_terms({(i, j): c for i, j, c in terms}) + parse("Y^4")
    sq, _ = squarefree_part(G)
    sq2, mult = squarefree_part(sq)
    assert not mult and sq2 == sq
