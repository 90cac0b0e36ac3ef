"""Product gadgets: small networks approximating scalar multiplication.

A gadget takes the 1x2 input ``(x | y)`` and returns a 1x1 approximation of
``x*y``, accurate within ``epsilon`` whenever ``|x|, |y| <= K``.  Two
factories ship here:

* ``relu2``: with rho(t) = ReLU(t)^2 the identity rho(t) + rho(-t) = t^2
  makes the polarization 4xy = (x+y)^2 - (x-y)^2 exact -- a fixed network
  with 12 weights in 2 layers, for every (epsilon, K).
* ``relu``: squaring is approximated on [0, 1] by the telescoped sawtooth
  construction; the two squares of the polarization identity share the same
  tower depth m, chosen from a closed-form error budget.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (ACTIVATIONS, MNN, ActivationMask, EntryBuilder, Layer,
                   realize_flat)


@dataclass(frozen=True)
class GadgetSpec:
    """Error budget and input box half-width for a product gadget."""

    epsilon: float
    K: float

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        if not self.K > 0.0:
            raise ValueError("K must be positive")


@dataclass(frozen=True)
class GadgetFactory:
    """A recipe producing a product gadget for any spec."""

    activation_name: str
    build: Callable[[GadgetSpec], MNN]


def build_product_relu2() -> MNN:
    """The exact product network over rho(t) = ReLU(t)^2.

    First layer emits the four pre-activations +-(x+y), +-(x-y); the second
    combines their squares as ((x+y)^2 - (x-y)^2) / 4 = xy.  12 weights,
    2 layers, no approximation error beyond floating-point rounding.
    """
    first = EntryBuilder()
    for col, (cx, cy) in enumerate([(1, 1), (-1, -1), (1, -1), (-1, 1)], start=1):
        first.add(1, col, 1, 1, cx).add(1, col, 1, 2, cy)
    layer1 = Layer(first.build((1, 4), (1, 2)), mask=ActivationMask.all_rho((1, 4)))
    second = EntryBuilder()
    for col, coeff in enumerate([0.25, 0.25, -0.25, -0.25], start=1):
        second.add(1, 1, 1, col, coeff)
    layer2 = Layer(second.build((1, 1), (1, 4)))
    return MNN([layer1, layer2], "relu2")


def _sawtooth_depth(epsilon: float, K: float) -> int:
    """Number of sawtooth stages needed for the two-sided error budget.

    With m stages the piecewise-linear square approximator is within
    2^(-2m-2) of t^2 on [0, 1]; after undoing the input rescaling by 2K the
    end-to-end error is at most K^2 * 2^(-2m-1), and m is the smallest
    integer making that <= epsilon.  The m = 0 degenerate tower (|t| itself)
    covers epsilon >= K^2/2.
    """
    if epsilon >= K * K / 2.0:
        return 0
    return max(1, math.ceil(0.5 * math.log2(K * K / epsilon) - 0.5))


def _zero_gadget(activation_name: str) -> MNN:
    layer = Layer(EntryBuilder().build((1, 1), (1, 2)))
    return MNN([layer], activation_name)


def build_product_relu(spec: GadgetSpec) -> MNN:
    """A ReLU product gadget meeting the requested error budget.

    Inputs are rescaled to u = (x+y)/2K and v = (x-y)/2K in [-1, 1]; the
    polarization identity then needs u^2 - v^2, and each square is
    approximated through |t| = ReLU(t) + ReLU(-t) followed by m sawtooth
    stages.  Both towers run in the same layers and share the telescoping
    accumulator, so the cost is 15m + 12 weights in m + 2 layers.  When
    epsilon >= K^2 the constant-zero network is already within budget.
    """
    eps, K = spec.epsilon, spec.K
    if eps >= K * K:
        return _zero_gadget("relu")
    m = _sawtooth_depth(eps, K)
    c = 1.0 / (2.0 * K)
    first = EntryBuilder()
    for col, (cx, cy) in enumerate([(c, c), (-c, -c), (c, -c), (-c, c)], start=1):
        first.add(1, col, 1, 1, cx).add(1, col, 1, 2, cy)
    layers = [Layer(first.build((1, 4), (1, 2)),
                    mask=ActivationMask.all_rho((1, 4)))]
    if m == 0:
        final = EntryBuilder()
        K2 = K * K
        for col, coeff in enumerate([K2, K2, -K2, -K2], start=1):
            final.add(1, 1, 1, col, coeff)
        layers.append(Layer(final.build((1, 1), (1, 4))))
        return MNN(layers, "relu")

    # state columns: (T, Q, T', Q', C); after stage s the linear combination
    # 2T - 4Q equals the s-th sawtooth iterate of |u| (same for the v tower)
    # and C carries the telescoped partial sum of the two towers' difference.
    half_bias = np.array([[0.0, -0.5, 0.0, -0.5, 0.0]])
    stage_mask = ActivationMask.from_positions((1, 5), [(1, 2), (1, 4)])
    stage1 = EntryBuilder()
    for col in (1, 2):
        stage1.add(1, col, 1, 1, 1.0).add(1, col, 1, 2, 1.0)
    for col in (3, 4):
        stage1.add(1, col, 1, 3, 1.0).add(1, col, 1, 4, 1.0)
    stage1.add(1, 5, 1, 1, 1.0).add(1, 5, 1, 2, 1.0)
    stage1.add(1, 5, 1, 3, -1.0).add(1, 5, 1, 4, -1.0)
    layers.append(Layer(stage1.build((1, 5), (1, 4)), half_bias, stage_mask))
    for s in range(2, m + 1):
        g = 4.0 ** (s - 1)
        stage = EntryBuilder()
        for col in (1, 2):
            stage.add(1, col, 1, 1, 2.0).add(1, col, 1, 2, -4.0)
        for col in (3, 4):
            stage.add(1, col, 1, 3, 2.0).add(1, col, 1, 4, -4.0)
        stage.add(1, 5, 1, 5, 1.0)
        stage.add(1, 5, 1, 1, -2.0 / g).add(1, 5, 1, 2, 4.0 / g)
        stage.add(1, 5, 1, 3, 2.0 / g).add(1, 5, 1, 4, -4.0 / g)
        layers.append(Layer(stage.build((1, 5), (1, 5)), half_bias, stage_mask))
    g = 4.0 ** m
    K2 = K * K
    final = (EntryBuilder()
             .add(1, 1, 1, 5, K2)
             .add(1, 1, 1, 1, -2.0 * K2 / g).add(1, 1, 1, 2, 4.0 * K2 / g)
             .add(1, 1, 1, 3, 2.0 * K2 / g).add(1, 1, 1, 4, -4.0 * K2 / g))
    layers.append(Layer(final.build((1, 1), (1, 5))))
    return MNN(layers, "relu")


relu2_factory = GadgetFactory("relu2", lambda spec: build_product_relu2())
relu_factory = GadgetFactory("relu", build_product_relu)

FACTORIES = {"relu2": relu2_factory, "relu": relu_factory}


def relu_gadget_bounds(epsilon: float, K: float):
    """Closed-form (M, L) upper bounds for the ReLU gadget, by budget branch."""
    if epsilon >= K * K:
        return 0.0, 1.0
    if epsilon >= K * K / 2.0:
        return 12.0, 2.0
    logK = math.log2(K)
    log_inv_eps = math.log2(1.0 / epsilon)
    return (30.0 * logK + 15.0 * log_inv_eps + 25.0,
            logK + 0.5 * log_inv_eps + 2.5)


def verify_gadget(net: MNN, rho, spec: GadgetSpec, grid_step: float) -> float:
    """Max |xy - R(net)(x, y)| over the uniform grid on [-K, K]^2."""
    if grid_step > spec.K / 50.0:
        raise ValueError("grid_step must be at most K/50")
    if rho is None:
        rho = ACTIVATIONS[net.activation_name]
    steps = max(1, round(2.0 * spec.K / grid_step))
    axis = np.linspace(-spec.K, spec.K, steps + 1)
    xs, ys = np.meshgrid(axis, axis, indexing="ij")
    xs, ys = xs.reshape(-1), ys.reshape(-1)
    out = realize_flat(net, rho, np.stack([xs, ys]))
    return float(np.max(np.abs(xs * ys - out[0])))
