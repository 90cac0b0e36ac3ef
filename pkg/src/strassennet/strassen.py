"""Networks that multiply matrices by the recursive seven-product scheme.

``build_str_pow2`` assembles the multiplication network for 2^k x 2^k
operands out of three pieces per recursion level: a split layer forming the
seven operand pairs, seven parallel child multipliers, and a mix layer
recombining the child products into the four output quadrants.  At the
bottom sit scalar product gadgets.  The weight and layer counts of the
result obey closed-form expressions (``formula_counts_pow2``) exactly.

Rectangular and general square operands are handled by zero-padding up to
the next power of two (``build_ext`` / ``build_ext_star``) and cropping the
result (``build_shr``).
"""

import math
from dataclasses import dataclass

from .combinators import concat, parallelize
from .core import MNN, EntryBuilder, Layer
from .gadgets import GadgetFactory, GadgetSpec

#: quadrant recombination: output quadrant -> [(child index, sign)]
_MIX_RULES = {
    (0, 0): [(1, 1.0), (4, 1.0), (5, -1.0), (7, 1.0)],
    (0, 1): [(3, 1.0), (5, 1.0)],
    (1, 0): [(2, 1.0), (4, 1.0)],
    (1, 1): [(1, 1.0), (2, -1.0), (3, 1.0), (6, 1.0)],
}

#: operand pairs: child index -> ([(A quadrant, sign)], [(B quadrant, sign)])
_SPLIT_RULES = {
    1: ([((0, 0), 1.0), ((1, 1), 1.0)], [((0, 0), 1.0), ((1, 1), 1.0)]),
    2: ([((1, 0), 1.0), ((1, 1), 1.0)], [((0, 0), 1.0)]),
    3: ([((0, 0), 1.0)], [((0, 1), 1.0), ((1, 1), -1.0)]),
    4: ([((1, 1), 1.0)], [((1, 0), 1.0), ((0, 0), -1.0)]),
    5: ([((0, 0), 1.0), ((0, 1), 1.0)], [((1, 1), 1.0)]),
    6: ([((1, 0), 1.0), ((0, 0), -1.0)], [((0, 0), 1.0), ((0, 1), 1.0)]),
    7: ([((0, 1), 1.0), ((1, 1), -1.0)], [((1, 0), 1.0), ((1, 1), 1.0)]),
}


@dataclass(frozen=True)
class RectShape:
    """Operand sizes for the product of an m x n by an n x p matrix."""

    m: int
    n: int
    p: int

    def __post_init__(self):
        if min(self.m, self.n, self.p) < 1:
            raise ValueError("matrix dimensions must be positive")

    @property
    def gamma(self) -> int:
        return max(self.m, self.n, self.p)

    @property
    def k(self) -> int:
        """Padding exponent: the smallest k with 2^k >= gamma."""
        return (self.gamma - 1).bit_length()


def build_mix(k: int, activation: str = "relu") -> MNN:
    """Recombination layer: seven stacked child products -> four quadrants."""
    if k < 1:
        raise ValueError("k must be >= 1")
    h = 2 ** (k - 1)
    builder = EntryBuilder()
    for (qr, qc), terms in _MIX_RULES.items():
        for child, sign in terms:
            builder.add_block(qr * h, qc * h, (child - 1) * h, 0, h, h, sign)
    linmap = builder.build((2 * h, 2 * h), (7 * h, h))
    return MNN([Layer(linmap)], activation)


def build_split(k: int, activation: str = "relu") -> MNN:
    """Operand-forming layer: (A | B) -> seven stacked operand pairs."""
    if k < 1:
        raise ValueError("k must be >= 1")
    h = 2 ** (k - 1)
    builder = EntryBuilder()
    for child, (a_terms, b_terms) in _SPLIT_RULES.items():
        row = (child - 1) * h
        for (qr, qc), sign in a_terms:
            builder.add_block(row, 0, qr * h, qc * h, h, h, sign)
        for (qr, qc), sign in b_terms:
            builder.add_block(row, h, qr * h, 2 * h + qc * h, h, h, sign)
    linmap = builder.build((7 * h, 2 * h), (2 * h, 4 * h))
    return MNN([Layer(linmap)], activation)


def build_str_pow2(k: int, eps: float, K: float,
                   factory: GadgetFactory) -> MNN:
    """Multiplication network for 2^k x 2^k operands, input (A | B).

    Each recursion level hands its seven children a quarter of the error
    budget and twice the input range; the k = 0 base case is one product
    gadget.  For |A|, |B| entrywise at most K the output matches A B within
    eps in the max norm.
    """
    if eps <= 0.0 or K <= 0.0:
        raise ValueError("eps and K must be positive")
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        gadget = factory.build(GadgetSpec(eps, K))
        if tuple(gadget.input_shape) != (1, 2) or tuple(gadget.output_shape) != (1, 1):
            raise ValueError("factory must produce gadgets mapping 1x2 -> 1x1")
        return gadget
    child = build_str_pow2(k - 1, eps / 4.0, 2.0 * K, factory)
    par = parallelize([child] * 7)
    act = factory.activation_name
    return concat(build_mix(k, act), concat(par, build_split(k, act)))


def formula_counts_pow2(k: int, M_gadget: int, L_gadget: int):
    """Exact (M, L) of the power-of-two network with the given gadget size."""
    if k < 0:
        raise ValueError("k must be >= 0")
    M = 7 ** k * (M_gadget + 12) - 12 * 4 ** k
    L = L_gadget + 2 * k
    return M, L


def build_ext(shape: RectShape, activation: str = "relu") -> MNN:
    """Padding layer for rectangular operands, input (A^T | B).

    Reads the transposed left operand, undoes the transpose, and zero-pads
    both operands to the 2^k x 2^k frame expected by the power-of-two
    multiplier.  Costs n (m + p) weights.
    """
    side = 2 ** shape.k
    builder = EntryBuilder()
    builder.add_transposed_block(0, 0, 0, 0, shape.m, shape.n)
    builder.add_block(0, side, 0, shape.m, shape.n, shape.p)
    linmap = builder.build((side, 2 * side), (shape.n, shape.m + shape.p))
    return MNN([Layer(linmap)], activation)


def build_ext_star(n: int, activation: str = "relu") -> MNN:
    """Padding layer for square operands, input (A | B); 2 n^2 weights."""
    if n < 1:
        raise ValueError("n must be >= 1")
    side = 2 ** RectShape(n, n, n).k
    builder = EntryBuilder()
    builder.add_block(0, 0, 0, 0, n, n)
    builder.add_block(0, side, 0, n, n, n)
    linmap = builder.build((side, 2 * side), (n, 2 * n))
    return MNN([Layer(linmap)], activation)


def build_shr(shape: RectShape, activation: str = "relu") -> MNN:
    """Cropping layer: keeps the top-left m x p block; m p weights."""
    side = 2 ** shape.k
    builder = EntryBuilder()
    builder.add_block(0, 0, 0, 0, shape.m, shape.p)
    linmap = builder.build((shape.m, shape.p), (side, side))
    return MNN([Layer(linmap)], activation)


def build_str_rect(shape: RectShape, eps: float, K: float,
                   factory: GadgetFactory) -> MNN:
    """Multiplier for m x n by n x p operands, input (A^T | B), output m x p."""
    act = factory.activation_name
    inner = build_str_pow2(shape.k, eps, K, factory)
    return concat(build_shr(shape, act), concat(inner, build_ext(shape, act)))


def build_str_square(n: int, eps: float, K: float,
                     factory: GadgetFactory) -> MNN:
    """Multiplier for n x n operands, input (A | B) untransposed."""
    shape = RectShape(n, n, n)
    act = factory.activation_name
    inner = build_str_pow2(shape.k, eps, K, factory)
    return concat(build_shr(shape, act), concat(inner, build_ext_star(n, act)))


def bound_counts_rect(shape: RectShape, M_gadget: int, L_gadget: int):
    """(M, L) upper bounds for the padded rectangular multiplier.

    The gadget arguments are the measured size of a gadget built at budget
    eps / (4 gamma^2) and half-width 2 gamma K, which dominates every leaf
    actually used.
    """
    gamma = shape.gamma
    M = 7.0 * gamma ** math.log2(7.0) * (M_gadget + 12) - 9.0 * gamma ** 2
    L = L_gadget + 2.0 * (math.log2(gamma) + 2.0)
    return M, L


def bound_counts_square(n: int, M_gadget: int, L_gadget: int):
    return bound_counts_rect(RectShape(n, n, n), M_gadget, L_gadget)


def bound_gadget_spec_rect(shape: RectShape, eps: float, K: float) -> GadgetSpec:
    """The gadget spec at which the rectangular-bound formulas are evaluated."""
    gamma = shape.gamma
    return GadgetSpec(eps / (4.0 * gamma * gamma), 2.0 * gamma * K)
