"""Experiment runner: seeded, deterministic verification suites with CSV/JSON artifacts.

Configuration comes from an optional JSON file plus command-line flags; flags
win.  All floating-point output goes through one fixed formatter and every
random draw is seeded explicitly, so identical configurations reproduce
byte-identical artifacts (the runtime_ms column is zeroed under --canonical,
which is the only field that is not reproducible).
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import boolfn, combinatorics, condcheck, expand, moments
from .budget import BudgetError
from .moments import ExhaustiveAllFunctions, Method, MomentSpec, PrfKeys, Source, UniformSample
from .prsgen import PrsGenerator, PrsKind

SCHEMA_LINE = "# schema=1"

MOMENT_COLUMNS = (
    "source", "kind", "n", "i", "t", "method", "seed", "haar_distance", "runtime_ms",
)
SWEEP_COLUMNS = MOMENT_COLUMNS + ("method_equiv_max_diff",)


def fmt_value(value) -> str:
    """Fixed, locale-free rendering: '.' decimal, scientific below 1e-3."""
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float):
        if value == 0.0:
            return "0"
        if abs(value) < 1e-3:
            return f"{value:.12e}"
        return f"{value:.12f}"
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, columns, rows) -> None:
    lines = [SCHEMA_LINE, ",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _parse_space(text: str, seed: int | None):
    if text == "exhaustive":
        return ExhaustiveAllFunctions()
    for prefix, cls in (("prf:", PrfKeys), ("uniform:", UniformSample)):
        if text.startswith(prefix):
            count = int(text[len(prefix):])
            if seed is None:
                raise SystemExit(f"--seed is required for the sampled space {text!r}")
            return cls(count, seed)
    raise SystemExit(f"unknown function space {text!r}")


_METHODS = {
    "bruteforce": Method.BRUTE_FORCE,
    "deltapair": Method.DELTA_PAIRING,
    "montecarlo": Method.MONTE_CARLO,
}


def _moment_spec(source, kind, n, i, ell, t, space, shared_key=False) -> MomentSpec:
    return MomentSpec(
        source=Source(source),
        n=n,
        t=t,
        kind=PrsKind(kind),
        i=i,
        ell=ell,
        function_space=space,
        shared_key=shared_key,
    )


def _report_row(report: moments.MomentReport, canonical: bool):
    spec = report.spec
    return (
        spec.source.value,
        spec.kind.value,
        spec.n,
        spec.i,
        spec.t,
        report.method.value,
        report.seed,
        report.haar_distance,
        0 if canonical else report.runtime_ms,
    )


def cmd_moments(args, out_dir: Path) -> int:
    space = _parse_space(args.space, args.seed)
    spec = _moment_spec(args.source, args.kind, args.n, args.i, args.ell, args.t,
                        space, args.shared_key)
    methods = (
        [Method.BRUTE_FORCE, Method.DELTA_PAIRING]
        if args.method == "both"
        else [_METHODS[args.method]]
    )
    rows, payloads = [], []
    for method in methods:
        report = moments.compare_to_haar(spec, method, args.budget_mib)
        rows.append(_report_row(report, args.canonical))
        payloads.append(json.loads(report.to_json(canonical_runtime=args.canonical)))
    write_csv(out_dir / "moments.csv", MOMENT_COLUMNS, rows)
    write_json(out_dir / "moments.json", payloads)
    return 0


def cmd_expand_check(args, out_dir: Path) -> int:
    kind = PrsKind(args.kind)
    if kind is not PrsKind.BINARY_PHASE:
        raise SystemExit("the closed form is defined for the binary kind only")
    if args.samples is None:
        functions = list(boolfn.enumerate_all(args.n, 2))
    else:
        if args.seed is None:
            raise SystemExit("--seed is required when sampling functions")
        rng = np.random.default_rng(args.seed)
        functions = [boolfn.random_function(args.n, 2, rng) for _ in range(args.samples)]
    worst = 0.0
    for f in functions:
        circuit = expand.evaluate(expand.construction1(f, args.n, args.i, kind),
                                  args.budget_mib)
        direct = expand.closed_form_construction1(f, args.n, args.i,
                                                  budget_override=args.budget_mib)
        worst = max(worst, float(np.max(np.abs(circuit.amplitudes - direct.amplitudes))))
    passed = worst <= 1e-12
    write_json(out_dir / "expand_check.json", {
        "n": args.n, "i": args.i, "functions": len(functions),
        "max_deviation": worst, "passed": passed,
    })
    return 0 if passed else 1


def cmd_lemmas(args, out_dir: Path) -> int:
    rows = []
    ok_all = True
    for n in range(1, args.max_n + 1):
        for t in range(1, args.max_t + 1):
            exact = combinatorics.dist_count(n, t)
            bound = combinatorics.dist_lower_bound(n, t)
            ok = exact >= bound
            ok_all &= ok
            rows.append(("dist_count", n, t, "", exact, float(bound), ok))
    for t in range(1, min(args.max_t, 5) + 1):
        for shape in _partitions(t):
            elements = _tuple_with_shape(shape)
            norm_sq = combinatorics.perm_state_norm_sq(elements)
            bound = combinatorics.perm_norm_bound(t, len(shape))
            ok = norm_sq <= bound
            ok_all &= ok
            rows.append(
                ("perm_norm", "", t, "+".join(map(str, shape)), float(norm_sq), bound, ok)
            )
    write_csv(out_dir / "lemmas.csv",
              ("check", "n", "t", "detail", "value", "bound", "ok"), rows)
    return 0 if ok_all else 1


def _partitions(t: int, smallest: int = 1):
    if t == 0:
        yield ()
        return
    for first in range(smallest, t + 1):
        for rest in _partitions(t - first, first):
            yield (first,) + rest


def _tuple_with_shape(shape) -> list[str]:
    width = max(1, (len(shape) - 1).bit_length())
    elements = []
    for value, multiplicity in enumerate(shape):
        elements.extend([format(value, f"0{width}b")] * multiplicity)
    return elements


def cmd_good_census(args, out_dir: Path) -> int:
    n, i, t = args.n, args.i, args.t
    census = combinatorics.good_census(n, i, t)
    ok = True
    for x_prime, y in combinatorics.iter_good_members(n, i, t):
        witness = combinatorics.recombine(x_prime, y)
        ok &= witness.round_trip()
    write_csv(out_dir / "good_census.csv",
              ("n", "i", "t", "dist", "good", "bound", "slack"),
              [(census.n, census.i, census.t, census.dist_size, census.good_size,
                census.bound, census.slack)])
    return 0 if ok and census.good_size >= census.bound else 1


def cmd_condition(args, out_dir: Path) -> int:
    n = args.n
    if args.witness == "binary":
        witness = condcheck.binary_phase_witness(n)
        kind = PrsKind.BINARY_PHASE
        functions = list(boolfn.enumerate_all(n, 2)) if n <= 3 else None
    else:
        witness = condcheck.general_phase_witness(n)
        kind = PrsKind.GENERAL_PHASE
        functions = None
    if functions is None:
        if args.seed is None:
            raise SystemExit("--seed is required when sampling functions")
        rng = np.random.default_rng(args.seed)
        functions = [
            boolfn.random_function(n, kind.range_modulus(n), rng)
            for _ in range(args.samples)
        ]
    report1 = condcheck.check_cond1(
        lambda f: PrsGenerator(kind, n, f), witness, n, functions
    )
    report2 = condcheck.check_cond2(witness)
    payload = {
        "witness": args.witness,
        "passed": report1.passed and report2.passed,
        "reports": [json.loads(report1.to_json()), json.loads(report2.to_json())],
    }
    write_json(out_dir / f"condition_{args.witness}.json", payload)
    return 0 if payload["passed"] else 1


def cmd_sweep(args, out_dir: Path, config: dict) -> int:
    grid = config.get("grid")
    if grid is None:
        raise SystemExit("sweep needs a config file with a 'grid' object")
    seed = args.seed if args.seed is not None else config.get("seed")
    axes = {
        "source": grid.get("source", ["plain"]),
        "kind": grid.get("kind", ["binary"]),
        "n": grid.get("n", []),
        "i": grid.get("i", [None]),
        "ell": grid.get("ell", [None]),
        "t": grid.get("t", [1]),
        "space": grid.get("space", ["exhaustive"]),
        "shared_key": grid.get("shared_key", [False]),
    }
    methods = [_METHODS[m] for m in grid.get("method", ["bruteforce"])]
    points = sorted(
        itertools.product(*axes.values()),
        key=lambda p: tuple(str(v) for v in p),
    )
    rows, failures = [], []
    for source, kind, n, i, ell, t, space_text, shared_key in points:
        point_desc = {"source": source, "kind": kind, "n": n, "i": i, "ell": ell,
                      "t": t, "space": space_text, "shared_key": shared_key}
        try:
            space = _parse_space(space_text, seed)
            spec = _moment_spec(source, kind, n, i, ell, t, space, shared_key)
            reports = [
                moments.compare_to_haar(spec, method, args.budget_mib)
                for method in methods
            ]
            equiv = None
            if len(reports) > 1:
                mats = [r.moment.matrix for r in reports]
                equiv = float(np.max(np.abs(mats[0] - mats[1])))
            for report in reports:
                rows.append(_report_row(report, args.canonical) + (equiv,))
        except (BudgetError, ValueError) as exc:
            failures.append({"point": point_desc, "error": str(exc)})
    rows.sort(key=lambda r: tuple(str(v) for v in r))
    write_csv(out_dir / "sweep.csv", SWEEP_COLUMNS, rows)
    if failures:
        write_json(out_dir / "sweep_failures.json", failures)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prslab",
        description="verification suites for phase-state ensembles and their expansions",
    )
    parser.add_argument("--config", type=Path, help="JSON config file (flags win)")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--budget-mib", type=int, default=None)
    parser.add_argument("--out-dir", type=Path, default=None)
    parser.add_argument("--canonical", action="store_true",
                        help="write runtime_ms as 0 for byte-stable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="one ensemble-vs-Haar comparison")
    p.add_argument("--source", choices=[s.value for s in Source], required=True)
    p.add_argument("--kind", choices=[k.value for k in PrsKind], default="binary")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int, default=None)
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--space", default="exhaustive")
    p.add_argument("--method", choices=[*_METHODS, "both"], default="bruteforce")
    p.add_argument("--shared-key", action="store_true",
                   help="draw one function per member and reuse it for every "
                        "block (experimental variant, no agreement guarantee)")

    p = sub.add_parser("expand-check", help="circuit vs closed-form oracle")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--kind", choices=[k.value for k in PrsKind], default="binary")
    p.add_argument("--samples", type=int, default=None,
                   help="sample count (default: exhaustive over all functions)")

    p = sub.add_parser("lemmas", help="exact counting bounds")
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--max-t", type=int, default=5)

    p = sub.add_parser("good-census", help="recombination census and round-trips")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--t", type=int, required=True)

    p = sub.add_parser("condition", help="basis-factorization condition checks")
    p.add_argument("--witness", choices=["binary", "general"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=64)

    p = sub.add_parser("sweep", help="grid of moment comparisons from a config file")

    return parser


def _apply_config(args: argparse.Namespace) -> dict:
    if args.config is None:
        return {}
    config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    for key, value in config.items():
        attr = key.replace("-", "_")
        if attr in ("grid",):
            continue
        if not hasattr(args, attr):
            continue
        current = getattr(args, attr)
        # identity checks: an explicit `--seed 0` must not look unset
        if current is None or current is False:
            if attr == "out_dir":
                value = Path(value)
            setattr(args, attr, value)
    return config


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _apply_config(args)
    out_dir = Path(args.out_dir) if args.out_dir is not None else Path("prslab_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        if args.command == "moments":
            return cmd_moments(args, out_dir)
        if args.command == "expand-check":
            return cmd_expand_check(args, out_dir)
        if args.command == "lemmas":
            return cmd_lemmas(args, out_dir)
        if args.command == "good-census":
            return cmd_good_census(args, out_dir)
        if args.command == "condition":
            return cmd_condition(args, out_dir)
        if args.command == "sweep":
            return cmd_sweep(args, out_dir, config)
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
