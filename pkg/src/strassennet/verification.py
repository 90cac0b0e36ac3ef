"""Acceptance checks: count formulas, error guarantees, oracle identities.

Each check returns a CriterionResult holding the measured quantity and the
threshold it was held to.  Checks are grouped into named suites for the
CLI (``gadgets``, ``strassen``, ``inversion``, ``identities``); the test
suite also runs them one by one.  All randomness flows through numpy
Generators derived from the single suite seed, so runs reproduce exactly.
"""

from dataclasses import dataclass

import numpy as np

from . import oracles
from .core import realize_many
from .gadgets import (FACTORIES, GadgetSpec, relu2_factory, relu_factory,
                      relu_gadget_bounds, verify_gadget)
from .inversion import (InversionSpec, build_inv, build_neu, build_sqr,
                        compute_N, inv_count_reference)
from .strassen import (RectShape, bound_counts_rect, bound_gadget_spec_rect,
                       build_str_pow2, build_str_rect, formula_counts_pow2)

DEFAULT_SEED = 42


@dataclass
class CriterionResult:
    name: str
    passed: bool
    measured: float
    threshold: str
    detail: str = ""
    cases: int = 0

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed),
                "measured": self.measured, "threshold": self.threshold,
                "detail": self.detail, "cases": self.cases}


def _rng(seed: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng([seed, *tags])


_POW2_MEMO: dict = {}


def _pow2_net(activation: str, k: int, eps: float, K: float):
    key = (activation, k, eps, K)
    if key not in _POW2_MEMO:
        _POW2_MEMO[key] = build_str_pow2(k, eps, K, FACTORIES[activation])
    return _POW2_MEMO[key]


def _random_with_norm(rng: np.random.Generator, n: int, bound: float):
    """A random matrix with spectral norm in (0.3, 1.0] times the bound."""
    A = rng.standard_normal((n, n))
    scale = bound * rng.uniform(0.3, 1.0)
    if n == 1:
        return A * (scale / max(abs(float(A[0, 0])), 1e-12))
    return A * (scale / np.linalg.norm(A, 2))


# --- strassen suite ---------------------------------------------------------

def check_weight_count_formula(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Criterion 1: num_weights of the power-of-two net equals the closed form."""
    eps, K = 1e-2, 1.0
    mismatches, cases, detail = 0, 0, []
    for name in ("relu2", "relu"):
        factory = FACTORIES[name]
        for k in range(5):
            leaf = factory.build(GadgetSpec(eps / 4 ** k, (2 ** k) * K))
            net = _pow2_net(name, k, eps, K)
            want, _ = formula_counts_pow2(k, leaf.num_weights, leaf.num_layers)
            cases += 1
            if net.num_weights != want:
                mismatches += 1
                detail.append(f"{name} k={k}: {net.num_weights} != {want}")
    return CriterionResult("weight-count-closed-form", mismatches == 0,
                           mismatches, "0 mismatches over k in 0..4, both gadgets",
                           "; ".join(detail), cases)


def check_layer_count_formula(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Criterion 2: num_layers of the power-of-two net equals the closed form."""
    eps, K = 1e-2, 1.0
    mismatches, cases, detail = 0, 0, []
    for name in ("relu2", "relu"):
        factory = FACTORIES[name]
        for k in range(5):
            leaf = factory.build(GadgetSpec(eps / 4 ** k, (2 ** k) * K))
            net = _pow2_net(name, k, eps, K)
            _, want = formula_counts_pow2(k, leaf.num_weights, leaf.num_layers)
            cases += 1
            if net.num_layers != want:
                mismatches += 1
                detail.append(f"{name} k={k}: {net.num_layers} != {want}")
    return CriterionResult("layer-count-closed-form", mismatches == 0,
                           mismatches, "0 mismatches over k in 0..4, both gadgets",
                           "; ".join(detail), cases)


def check_multiplication_error(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Criterion 3: sup-norm error of the ReLU multiplication nets stays within eps."""
    K = 1.0
    worst_ratio, cases = 0.0, 0
    for e_idx, eps in enumerate((1e-1, 1e-2, 1e-3)):
        for k in (1, 2, 3):
            net = _pow2_net("relu", k, eps, K)
            side = 2 ** k
            rng = _rng(seed, 3, e_idx, k)
            pairs = rng.uniform(-K, K, size=(100, 2, side, side))
            inputs = np.concatenate([pairs[:, 0], pairs[:, 1]], axis=2)
            outs = realize_many(net, None, inputs)
            for A, B, out in zip(pairs[:, 0], pairs[:, 1], outs):
                err = float(np.max(np.abs(oracles.matmul_naive(A, B) - out)))
                worst_ratio = max(worst_ratio, err / eps)
                cases += 1
    return CriterionResult("multiplication-sup-error", worst_ratio <= 1.0,
                           worst_ratio, "max error / eps <= 1 over the sweep",
                           "eps in {1e-1,1e-2,1e-3} x k in {1,2,3} x 100 pairs",
                           cases)


def check_exact_gadget_equivalence(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Criterion 4: squared-activation nets reproduce the naive product to 1e-9."""
    tol = 1e-9
    worst, cases = 0.0, 0
    for idx, n in enumerate((2, 4, 8, 3, 6)):
        pow2 = n & (n - 1) == 0
        if pow2:
            net = _pow2_net("relu2", (n - 1).bit_length(), 1.0, 1.0)
        else:
            net = build_str_rect(RectShape(n, n, n), 1.0, 1.0, relu2_factory)
        rng = _rng(seed, 4, idx)
        pairs = rng.uniform(-1.0, 1.0, size=(200, 2, n, n))
        if pow2:
            inputs = np.concatenate([pairs[:, 0], pairs[:, 1]], axis=2)
        else:
            inputs = np.concatenate(
                [pairs[:, 0].transpose(0, 2, 1), pairs[:, 1]], axis=2)
        outs = realize_many(net, None, inputs)
        for A, B, out in zip(pairs[:, 0], pairs[:, 1], outs):
            worst = max(worst, float(np.max(np.abs(oracles.matmul_naive(A, B) - out))))
            cases += 1
    return CriterionResult("exact-gadget-equivalence", worst <= tol, worst,
                           f"max abs deviation <= {tol}",
                           "n in {2,4,8} as power-of-two nets, {3,6} padded", cases)


def check_rect_square_bounds(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Criterion 5: rectangular nets respect the gamma^(log2 7) count bounds."""
    eps, K = 1e-2, 1.0
    failures, cases, detail = 0, 0, []
    for (m, n, p) in ((2, 3, 2), (3, 3, 3), (5, 6, 4)):
        shape = RectShape(m, n, p)
        for name, factory in FACTORIES.items():
            gadget = factory.build(bound_gadget_spec_rect(shape, eps, K))
            bound_M, bound_L = bound_counts_rect(
                shape, gadget.num_weights, gadget.num_layers)
            net = build_str_rect(shape, eps, K, factory)
            cases += 1
            if not (net.num_weights <= bound_M and net.num_layers <= bound_L):
                failures += 1
                detail.append(
                    f"{name} {m}x{n}x{p}: M {net.num_weights} vs {bound_M:.1f}, "
                    f"L {net.num_layers} vs {bound_L:.1f}")
    return CriterionResult("rectangular-count-bounds", failures == 0, failures,
                           "measured M, L within bounds for all shapes/gadgets",
                           "; ".join(detail), cases)


def check_growth_properties(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Criterion 10: exact 7x count recursion, and affine gadget growth in log2(1/eps)."""
    eps, K = 1e-2, 1.0
    M = [_pow2_net("relu2", k, eps, K).num_weights for k in range(5)]
    recursion_ok = all(
        M[k + 1] + 12 * 4 ** (k + 1) == 7 * (M[k] + 12 * 4 ** k)
        for k in range(4))
    r2 = gadget_growth_r2()
    passed = recursion_ok and r2 >= 0.98
    return CriterionResult("count-growth-properties", passed, r2,
                           "recursion exact for k in 0..3 and fit R^2 >= 0.98",
                           f"recursion_ok={recursion_ok}, R^2={r2:.4f}", 5 + 15)


def gadget_growth_r2():
    """R^2 of the affine fit of ReLU gadget weights against log2(1/eps)."""
    es = np.arange(2, 17, dtype=float)
    sizes = np.array([
        relu_factory.build(GadgetSpec(2.0 ** -e, 1.0)).num_weights for e in es])
    slope, intercept = np.polyfit(es, sizes, 1)
    pred = slope * es + intercept
    ss_res = float(np.sum((sizes - pred) ** 2))
    ss_tot = float(np.sum((sizes - sizes.mean()) ** 2))
    return 1.0 - ss_res / ss_tot


# --- gadgets suite ----------------------------------------------------------

def check_gadget_errors(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Product gadgets meet their advertised sup error on [-K, K]^2."""
    worst_ratio, cases = 0.0, 0
    for K in (0.5, 1.0, 2.0):
        grid = K / 100.0
        for eps in (2.0 * K * K, 0.7 * K * K, 0.5, 0.1, 0.01, 1e-3):
            spec = GadgetSpec(eps, K)
            err = verify_gadget(relu_factory.build(spec), None, spec, grid)
            worst_ratio = max(worst_ratio, err / eps)
            cases += 1
        spec = GadgetSpec(1.0, K)
        err = verify_gadget(relu2_factory.build(spec), None, spec, grid)
        worst_ratio = max(worst_ratio, err / 1e-12)
        cases += 1
    return CriterionResult("gadget-sup-error", worst_ratio <= 1.0, worst_ratio,
                           "max grid error / eps <= 1 (1e-12 for exact gadget)",
                           "K in {0.5,1,2}, eps down to 1e-3, grid K/100", cases)


def check_gadget_size_bounds(seed: int = DEFAULT_SEED) -> CriterionResult:
    """ReLU gadget sizes stay within the closed-form M and L envelopes."""
    failures, cases, detail = 0, 0, []
    for K in (0.5, 1.0, 2.0, 4.0):
        for e in range(1, 13):
            eps = 2.0 ** -e
            net = relu_factory.build(GadgetSpec(eps, K))
            bound_M, bound_L = relu_gadget_bounds(eps, K)
            cases += 1
            if not (net.num_weights <= bound_M and net.num_layers <= bound_L):
                failures += 1
                detail.append(f"K={K} eps=2^-{e}: ({net.num_weights}, "
                              f"{net.num_layers}) vs ({bound_M:.1f}, {bound_L:.1f})")
    return CriterionResult("gadget-size-envelope", failures == 0, failures,
                           "measured (M, L) within the closed-form envelope",
                           "; ".join(detail), cases)


def check_gadget_growth_fit(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Affine fit quality of gadget size against log2(1/eps)."""
    r2 = gadget_growth_r2()
    return CriterionResult("gadget-growth-fit", r2 >= 0.98, r2, "R^2 >= 0.98",
                           "eps = 2^-2 .. 2^-16 at K=1", 15)


# --- identities suite -------------------------------------------------------

def check_neumann_identities(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Criterion 6: doubling-product and rescaled-product identities (oracle only)."""
    tol = 1e-10
    worst, cases = 0.0, 0
    for N in range(4):
        for n in (2, 4, 8):
            for s in range(100):
                rng = _rng(seed, 6, N, n, s)
                A = _random_with_norm(rng, n, 0.9)
                lhs = oracles.neumann_partial(A, 2 ** (N + 1))
                prod = np.eye(n)
                prod_scaled = np.eye(n)
                P = A.copy()
                H = A / 2.0
                for k in range(N + 1):
                    prod = oracles.matmul_naive(prod, P + np.eye(n))
                    prod_scaled = oracles.matmul_naive(
                        prod_scaled, H + 2.0 ** -(2 ** k) * np.eye(n))
                    if k < N:
                        P = oracles.matmul_naive(P, P)
                        H = oracles.matmul_naive(H, H)
                rhs2 = 2.0 ** (2 ** (N + 1) - 1) * prod_scaled
                scale = max(1.0, float(np.max(np.abs(lhs))))
                dev = max(float(np.max(np.abs(lhs - prod))),
                          float(np.max(np.abs(lhs - rhs2)))) / scale
                worst = max(worst, dev)
                cases += 1
    return CriterionResult("neumann-product-identities", worst <= tol, worst,
                           f"relative deviation <= {tol}",
                           "N in 0..3, n in {2,4,8}, 100 seeds each", cases)


def check_norm_domination(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Criterion 11: spectral norm never exceeds n times the max-entry norm."""
    margin = 1e-9
    violations, cases, worst = 0, 0, -np.inf
    for n in (1, 2, 4, 8):
        for s in range(250):
            rng = _rng(seed, 11, n, s)
            A = rng.uniform(-3.0, 3.0, size=(n, n))
            gap = oracles.spectral_norm(A) - n * float(np.max(np.abs(A)))
            worst = max(worst, gap)
            cases += 1
            if gap > margin:
                violations += 1
    return CriterionResult("norm-domination", violations == 0, worst,
                           f"spectral - n*maxabs <= {margin} everywhere",
                           f"{violations} violations over n in {{1,2,4,8}}", cases)


# --- inversion suite --------------------------------------------------------

def check_squaring_error(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Criterion 7: repeated-squaring nets track A^(2^N) in spectral norm."""
    worst_ratio, cases = 0.0, 0
    for N in (1, 2, 3):
        for n in (2, 4):
            for eps in (0.2, 0.05):
                net = build_sqr(N, n, eps, relu_factory)
                rng = _rng(seed, 7, N, n, int(eps * 100))
                mats = np.stack(
                    [_random_with_norm(rng, n, 0.5) for _ in range(50)])
                outs = realize_many(net, None, mats)
                for A, out in zip(mats, outs):
                    P = A.copy()
                    for _ in range(N):
                        P = oracles.matmul_naive(P, P)
                    err = oracles.spectral_norm(P - out)
                    worst_ratio = max(worst_ratio, err / eps)
                    cases += 1
    return CriterionResult("repeated-squaring-error", worst_ratio <= 1.0,
                           worst_ratio, "spectral error / eps <= 1",
                           "N in {1,2,3}, n in {2,4}, eps in {0.2,0.05}", cases)


def check_neumann_sum_error(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Criterion 8: truncated-sum nets track the partial Neumann sums; N=1 exact."""
    worst_ratio, cases, detail = 0.0, 0, []
    count_ok = True
    for n in (2, 4):
        one = build_neu(1, n, 0.1, relu_factory)
        if (one.num_weights, one.num_layers) != (n * n + n, 1):
            count_ok = False
            detail.append(f"N=1 n={n}: counts ({one.num_weights}, {one.num_layers})")
    for N in (2, 3):
        for n in (2, 4):
            for eps in (0.1, 0.05):
                net = build_neu(N, n, eps, relu_factory)
                rng = _rng(seed, 8, N, n, int(eps * 100))
                mats = np.stack(
                    [_random_with_norm(rng, n, 0.5) for _ in range(50)])
                outs = realize_many(net, None, mats)
                for A, out in zip(mats, outs):
                    want = oracles.neumann_partial(A, 2 ** N)
                    err = oracles.spectral_norm(want - out)
                    worst_ratio = max(worst_ratio, err / eps)
                    cases += 1
    passed = worst_ratio <= 1.0 and count_ok
    return CriterionResult("neumann-sum-error", passed, worst_ratio,
                           "spectral error / eps <= 1; N=1 counts (n^2+n, 1)",
                           "; ".join(detail) or
                           "N in {2,3}, n in {2,4}, eps in {0.1,0.05}", cases)


def check_inversion(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Criterion 9: inversion nets hit the eps target; counts respect the bounds."""
    delta = 0.5
    worst_ratio, cases, detail = 0.0, 0, []
    counts_ok = True
    for n in (2, 4, 8):
        spec = InversionSpec(n, 1.0, 1.2, delta)
        assert compute_N(spec.epsilon / 2.0, delta) == 1
        net = build_inv(spec, relu2_factory)
        want_M, want_L, exact = inv_count_reference(spec, relu2_factory)
        if not (exact and (net.num_weights, net.num_layers) == (want_M, want_L)):
            counts_ok = False
            detail.append(f"one-stage n={n}: ({net.num_weights}, {net.num_layers})"
                          f" != ({want_M}, {want_L})")
    for alpha in (1.0, 2.0):
        for eps in (0.1, 0.01):
            for n in (2, 4, 8):
                spec = InversionSpec(n, alpha, eps, delta)
                net = build_inv(spec, relu_factory)
                bound_M, bound_L, exact = inv_count_reference(spec, relu_factory)
                if exact:
                    ok = (net.num_weights, net.num_layers) == (bound_M, bound_L)
                else:
                    ok = (net.num_weights <= bound_M
                          and net.num_layers <= bound_L)
                if not ok:
                    counts_ok = False
                    detail.append(
                        f"alpha={alpha} eps={eps} n={n}: "
                        f"({net.num_weights}, {net.num_layers}) vs "
                        f"({bound_M:.0f}, {bound_L:.0f})")
                mats = np.stack([
                    oracles.gen_contraction(n, delta, alpha,
                                            seed * 1000 + 17 * n + s)
                    for s in range(25)])
                outs = realize_many(net, None, mats)
                for A, out in zip(mats, outs):
                    err = oracles.spectral_norm(oracles.exact_inverse(A) - out)
                    worst_ratio = max(worst_ratio, err / eps)
                    cases += 1
    passed = worst_ratio <= 1.0 and counts_ok
    return CriterionResult("inversion-error-and-counts", passed, worst_ratio,
                           "spectral error / eps <= 1; counts within bounds",
                           "; ".join(detail) or
                           "alpha in {1,2}, eps in {0.1,0.01}, n in {2,4,8}",
                           cases)


SUITES = {
    "gadgets": (check_gadget_errors, check_gadget_size_bounds,
                check_gadget_growth_fit),
    "strassen": (check_weight_count_formula, check_layer_count_formula,
                 check_multiplication_error, check_exact_gadget_equivalence,
                 check_rect_square_bounds, check_growth_properties),
    "inversion": (check_squaring_error, check_neumann_sum_error,
                  check_inversion),
    "identities": (check_neumann_identities, check_norm_domination),
}


def run_suite(name: str, seed: int = DEFAULT_SEED):
    """Run one named suite; returns the list of CriterionResult."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from "
                         f"{sorted(SUITES)}")
    return [fn(seed) for fn in SUITES[name]]
