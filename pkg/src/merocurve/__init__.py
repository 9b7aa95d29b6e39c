"""Branches, contact trees and slice factorizations of meromorphic curves.

Polynomials live in k((X))[Y] with k a lazily grown tower of number
fields.  The main entry points:

    >>> from merocurve import parse, Context, tree_of
    >>> with Context():
    ...     T = tree_of(parse("(Y^2 - X^3)^2 - X^5*Y"))
    >>> [B.id for B in T]
    ['B0', 'B1', 'B2']
"""

from .charseq import CharSeq, LambdaData, char_seq, lambda_data, strength_at
from .cli import parse, pretty
from .coeff import Alg, Tower
from .contact_tree import (
    Bud,
    ContactTree,
    contact,
    contact_set,
    d_double_prime,
    d_prime,
    int_branches,
    noc,
    strict_friends,
    tree_of,
    tree_of_product,
)
from .errors import *  # noqa: F401,F403
from .meropoly import MeroPoly, format_mero, int_mult, jacobian, resultant_y
from .newton import Branch, Context, Factorization, factor, puiseux_roots
from .series import INF, EdgeTriple, PuiseuxSeries
from .slices import (
    FactorizationReport,
    assign_slices,
    derivative_factorization,
    jacobian_factorization,
    minco,
    pinco,
    sinco,
)

__version__ = "0.1.0"
