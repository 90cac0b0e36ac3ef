"""Command-line front end: build networks, evaluate them, run the checks.

    snn build strassen-pow2 --k 2 --eps 0.01 --K 1 --out net.json
    snn eval --net net.json --a A.csv --b B.csv --layout ab --out C.csv
    snn verify --suite strassen --seed 42
    snn report bounds --out bounds.csv

Exit codes: 0 success, 1 validation failure (bad parameters, bad files,
shape mismatches), 2 verification failure (a suite criterion did not hold).
The default seed is 42, overridden by the SNN_SEED environment variable,
overridden by an explicit --seed.
"""

import argparse
import csv
import io as _io
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .core import realize
from .gadgets import FACTORIES, GadgetSpec, relu_gadget_bounds
from .inversion import (InversionSpec, build_inv, compute_N, compute_Sigma,
                        inv_count_reference, series_length_estimate)
from .io import load_matrix, load_network, save_matrix, save_network
from .strassen import (RectShape, bound_counts_rect, bound_counts_square,
                       bound_gadget_spec_rect, build_str_pow2, build_str_rect,
                       build_str_square, formula_counts_pow2)
from .verification import SUITES, run_suite

DEFAULT_SEED = 42


@dataclass
class BoundReport:
    """Measured counts of a built network against its reference counts.

    ``formula_*`` fields hold exact targets (equality expected);
    ``bound_*`` fields hold upper bounds (measured <= bound expected).
    Only the applicable pair is populated.
    """

    measured_M: int
    measured_L: int
    satisfied: bool
    formula_M: float = None
    formula_L: float = None
    bound_M: float = None
    bound_L: float = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc = {"measured_M": self.measured_M, "measured_L": self.measured_L}
        for name in ("formula_M", "formula_L", "bound_M", "bound_L"):
            value = getattr(self, name)
            if value is not None:
                doc[name] = value
        doc["satisfied"] = bool(self.satisfied)
        doc.update(self.extras)
        return doc


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2; keep 2 for verification
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _factory(args):
    if args.activation not in FACTORIES:
        raise ValueError(f"unknown activation {args.activation!r}; "
                         f"choose from {sorted(FACTORIES)}")
    return FACTORIES[args.activation]


def _require_params(args, names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n for n in missing)
        raise ValueError(f"{args.kind} requires {flags}")


def build_network_and_report(args):
    factory = _factory(args)
    eps, K = args.eps, args.K
    if args.kind == "strassen-pow2":
        _require_params(args, ["k"])
        net = build_str_pow2(args.k, eps, K, factory)
        leaf = factory.build(GadgetSpec(eps / 4 ** args.k, (2 ** args.k) * K))
        fM, fL = formula_counts_pow2(args.k, leaf.num_weights, leaf.num_layers)
        report = BoundReport(net.num_weights, net.num_layers,
                             (net.num_weights, net.num_layers) == (fM, fL),
                             formula_M=fM, formula_L=fL)
    elif args.kind == "strassen-rect":
        _require_params(args, ["m", "n", "p"])
        shape = RectShape(args.m, args.n, args.p)
        net = build_str_rect(shape, eps, K, factory)
        gadget = factory.build(bound_gadget_spec_rect(shape, eps, K))
        bM, bL = bound_counts_rect(shape, gadget.num_weights, gadget.num_layers)
        report = BoundReport(net.num_weights, net.num_layers,
                             net.num_weights <= bM and net.num_layers <= bL,
                             bound_M=bM, bound_L=bL)
    elif args.kind == "strassen-square":
        _require_params(args, ["n"])
        net = build_str_square(args.n, eps, K, factory)
        shape = RectShape(args.n, args.n, args.n)
        gadget = factory.build(bound_gadget_spec_rect(shape, eps, K))
        bM, bL = bound_counts_square(args.n, gadget.num_weights,
                                     gadget.num_layers)
        report = BoundReport(net.num_weights, net.num_layers,
                             net.num_weights <= bM and net.num_layers <= bL,
                             bound_M=bM, bound_L=bL)
    elif args.kind == "inverse":
        _require_params(args, ["n"])
        spec = InversionSpec(args.n, args.alpha, eps, args.delta)
        net = build_inv(spec, factory)
        rM, rL, exact = inv_count_reference(spec, factory)
        extras = {
            "N": compute_N(eps / (2.0 * args.alpha), args.delta),
            "Sigma": compute_Sigma(eps / args.alpha, args.delta, args.n),
            "series_length_estimate":
                series_length_estimate(eps / args.alpha, args.delta),
        }
        if exact:
            ok = (net.num_weights, net.num_layers) == (rM, rL)
            report = BoundReport(net.num_weights, net.num_layers, ok,
                                 formula_M=rM, formula_L=rL, extras=extras)
        else:
            ok = net.num_weights <= rM and net.num_layers <= rL
            report = BoundReport(net.num_weights, net.num_layers, ok,
                                 bound_M=rM, bound_L=rL, extras=extras)
    elif args.kind == "gadget":
        net = factory.build(GadgetSpec(eps, K))
        if args.activation == "relu2":
            report = BoundReport(net.num_weights, net.num_layers,
                                 (net.num_weights, net.num_layers) == (12, 2),
                                 formula_M=12, formula_L=2)
        else:
            bM, bL = relu_gadget_bounds(eps, K)
            report = BoundReport(net.num_weights, net.num_layers,
                                 net.num_weights <= bM and net.num_layers <= bL,
                                 bound_M=bM, bound_L=bL)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown build kind {args.kind!r}")
    return net, report


def cmd_build(args) -> int:
    net, report = build_network_and_report(args)
    save_network(net, args.out)
    doc = json.dumps(report.to_dict(), indent=1)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(doc + "\n")
    else:
        print(doc)
    return 0


def cmd_eval(args) -> int:
    net = load_network(args.net)
    if args.input is not None:
        X = load_matrix(args.input)
    else:
        A = load_matrix(args.a)
        B = load_matrix(args.b)
        left = A.T if args.layout == "atb" else A
        if left.shape[0] != B.shape[0]:
            raise ValueError(
                f"operands do not stack: left block is {left.shape[0]} rows, "
                f"right block is {B.shape[0]} (layout {args.layout})")
        X = np.hstack([left, B])
    expect = (net.input_shape.rows, net.input_shape.cols)
    if X.shape != expect:
        raise ValueError(f"input is {X.shape[0]}x{X.shape[1]} but the network "
                         f"expects {expect[0]}x{expect[1]}")
    save_matrix(realize(net, None, X), args.out)
    return 0


def cmd_verify(args) -> int:
    results = run_suite(args.suite, args.seed)
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}: measured={res.measured:.6g} "
              f"[{res.threshold}] cases={res.cases}")
    doc = {"suite": args.suite, "seed": args.seed,
           "all_passed": all(r.passed for r in results),
           "results": [r.to_dict() for r in results]}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    return 0 if doc["all_passed"] else 2


def _growth_rows(activation: str):
    factory = FACTORIES[activation]
    eps, K = 1e-2, 1.0
    rows = []
    sizes = []
    for k in range(5):
        net = build_str_pow2(k, eps, K, factory)
        leaf = factory.build(GadgetSpec(eps / 4 ** k, (2 ** k) * K))
        fM, _ = formula_counts_pow2(k, leaf.num_weights, leaf.num_layers)
        sizes.append(net.num_weights)
        rows.append(["pow2", k, net.num_weights, fM, net.num_weights == fM])
    for k in range(4):
        lhs = sizes[k + 1] + 12 * 4 ** (k + 1)
        rhs = 7 * (sizes[k] + 12 * 4 ** k)
        rows.append(["pow2-recursion", k, lhs, rhs, lhs == rhs])
    es = np.arange(2, 17, dtype=float)
    gms = np.array([FACTORIES["relu"].build(GadgetSpec(2.0 ** -e, 1.0)).num_weights
                    for e in es])
    slope, intercept = np.polyfit(es, gms, 1)
    pred = slope * es + intercept
    for e, gm, pv in zip(es, gms, pred):
        rows.append(["gadget", int(e), int(gm), round(float(pv), 3), ""])
    ss_res = float(np.sum((gms - pred) ** 2))
    ss_tot = float(np.sum((gms - gms.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot
    rows.append(["gadget-fit-r2", "", round(r2, 6), 0.98, r2 >= 0.98])
    return rows


def _bounds_rows(args):
    factory = _factory(args)
    rows = []
    for n in (2, 4, 8):
        spec = InversionSpec(n, args.alpha, args.eps, args.delta)
        net = build_inv(spec, factory)
        rM, rL, exact = inv_count_reference(spec, factory)
        if exact:
            ok = (net.num_weights, net.num_layers) == (rM, rL)
        else:
            ok = net.num_weights <= rM and net.num_layers <= rL
        rows.append([n, args.alpha, args.eps, args.delta,
                     compute_N(args.eps / (2.0 * args.alpha), args.delta),
                     round(series_length_estimate(args.eps / args.alpha,
                                                  args.delta), 3),
                     net.num_weights, round(float(rM), 1),
                     net.num_layers, round(float(rL), 1), ok])
    return rows


def cmd_report(args) -> int:
    if args.kind == "growth":
        header = ["series", "x", "measured_M", "reference", "satisfied"]
        rows = _growth_rows(args.activation)
    else:
        header = ["n", "alpha", "eps", "delta", "N", "series_length_estimate",
                  "measured_M", "bound_M", "measured_L", "bound_L", "satisfied"]
        rows = _bounds_rows(args)
    buf = _io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def _default_seed() -> int:
    raw = os.environ.get("SNN_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"SNN_SEED must be an integer, got {raw!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="snn",
                     description="Build, evaluate, and check matrix networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a network and write it as JSON")
    b.add_argument("kind", choices=["strassen-pow2", "strassen-rect",
                                    "strassen-square", "inverse", "gadget"])
    b.add_argument("--k", type=int, default=None, help="recursion depth")
    b.add_argument("--m", type=int, default=None)
    b.add_argument("--n", type=int, default=None)
    b.add_argument("--p", type=int, default=None)
    b.add_argument("--eps", type=float, default=0.5)
    b.add_argument("--K", type=float, default=1.0)
    b.add_argument("--alpha", type=float, default=1.0)
    b.add_argument("--delta", type=float, default=0.5)
    b.add_argument("--activation", choices=sorted(FACTORIES), default="relu")
    b.add_argument("--out", required=True, help="network JSON path")
    b.add_argument("--report", default=None,
                   help="report JSON path (default: stdout)")
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("eval", help="apply a stored network to a CSV matrix")
    e.add_argument("--net", required=True)
    e.add_argument("--input", default=None,
                   help="CSV already laid out as the network expects")
    e.add_argument("--a", default=None, help="left operand CSV")
    e.add_argument("--b", default=None, help="right operand CSV")
    e.add_argument("--layout", choices=["ab", "atb"], default="ab",
                   help="stack operands as (A|B) or (A^T|B)")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("verify", help="run an acceptance suite")
    v.add_argument("--suite", choices=sorted(SUITES), required=True)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--out", default=None, help="report JSON path")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="emit a CSV table of counts vs targets")
    r.add_argument("kind", choices=["growth", "bounds"])
    r.add_argument("--activation", choices=sorted(FACTORIES), default="relu2")
    r.add_argument("--alpha", type=float, default=1.0)
    r.add_argument("--eps", type=float, default=0.1)
    r.add_argument("--delta", type=float, default=0.5)
    r.add_argument("--out", default=None, help="CSV path (default: stdout)")
    r.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "eval":
        has_pair = args.a is not None and args.b is not None
        if (args.input is None) == (not has_pair):
            parser.error("eval needs either --input or both --a and --b")
    if args.command == "verify" and args.seed is None:
        try:
            args.seed = _default_seed()
        except ValueError as exc:
            print(f"snn: error: {exc}", file=sys.stderr)
            return 1
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"snn: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
