"""Independent reference computations with sympy, used to freeze and cross-check values."""

from fractions import Fraction

import sympy

from merocurve import MeroPoly

X, Y = sympy.symbols("X Y")


def to_sympy(g: MeroPoly):
    expr = sympy.Integer(0)
    for j, c in g.coeffs.items():
        assert c.is_exact
        for e, v in c.terms():
            v = Fraction(v)
            expr += sympy.Rational(v.numerator, v.denominator) * X ** sympy.Rational(e.numerator, e.denominator) * Y ** j
    return expr


def from_sympy(expr) -> MeroPoly:
    out = {}
    expr = sympy.expand(expr)
    for term in sympy.Add.make_args(expr):
        c, rest = term.as_coeff_Mul()
        powers = rest.as_powers_dict() if rest != 1 else {}
        i = Fraction(str(powers.get(X, 0)))
        j = int(powers.get(Y, 0))
        out[(i, j)] = out.get((i, j), 0) + Fraction(str(c))
    return MeroPoly.from_terms(out)


def resultant_order(f, g) -> Fraction:
    """ord_X Res_Y(f, g) for Laurent inputs, via sympy."""
    num_f, num_g = sympy.together(to_sympy(f)), sympy.together(to_sympy(g))
    r = sympy.factor(sympy.resultant(num_f, num_g, Y))
    return Fraction(str(sympy.Poly(sympy.numer(r), X).monoms()[-1][0])) - Fraction(
        str(sympy.degree(sympy.denom(r), X))
    )


def resultant(f, g):
    return sympy.expand(sympy.resultant(to_sympy(f), to_sympy(g), Y))
