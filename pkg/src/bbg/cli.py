"""``bbg`` command line.

Exit status: 0 when every check passes, 2 on any property violation, 1 on
operational errors (bad arguments, unreadable input, infeasible parameters).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .errors import BBGError
from .graph_core import DegreeParams, deserialize_many, serialize_many
from .harness import (
    DEFAULT_TINY,
    CheckResult,
    _guard,
    check_coupling,
    check_dp_family,
    check_exact_means,
    check_heavy_bound,
    check_light_mean,
    check_meta_graph,
    check_switching_counts,
    check_tails,
    derive_seed,
    make_report,
    plot_data,
    report_json,
    results_csv,
    run_digraph,
    run_verify_all,
    sweep_lambda_m,
    sweep_sigma2,
)
from .oracle import check_margins, enumerate_family
from .sampler import ChainConfig, sample_rejection, sample_uniform
from .spectra import spectral_summary

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


def read_grid(path: str) -> list[tuple[int, int, int, int]]:
    """One ``n m d1 d2`` quadruple per line; blank lines and ``#`` comments ignored."""
    grid = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 4:
            raise BBGError(f"{path}:{lineno}: expected 'n m d1 d2', got {line!r}")
        grid.append(tuple(int(x) for x in parts))
    return grid


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(";", ",").split(",") if x.strip()]


def _params_list(text: str) -> list[tuple[int, ...]]:
    out = []
    for chunk in text.split(";"):
        if chunk.strip():
            vals = tuple(int(x) for x in chunk.replace(" ", ",").split(",") if x)
            if len(vals) != 4:
                raise BBGError(f"expected four integers per entry, got {chunk!r}")
            out.append(vals)
    return out


def _single_params(args) -> DegreeParams:
    if None in (args.n, args.m, args.d1, args.d2):
        raise BBGError("this command needs --n --m --d1 --d2")
    return check_margins(args.n, args.m, args.d1, args.d2)


def _grid(args) -> list:
    if getattr(args, "grid", None):
        return read_grid(args.grid)
    return [_single_params(args).as_tuple()]


def _add_common(p: argparse.ArgumentParser, params: bool = True):
    if params:
        p.add_argument("--n", type=int)
        p.add_argument("--m", type=int)
        p.add_argument("--d1", type=int)
        p.add_argument("--d2", type=int)
        p.add_argument("--grid", help="file with one 'n m d1 d2' per line")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.add_argument("--csv", help="also write results as CSV")
    p.add_argument("--plot-data", metavar="DIR", help="write two-column text files for plotting")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bbg", description="Random bipartite biregular graph experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="enumerate a tiny family exactly")
    _add_common(p)
    p.add_argument("--graphs", help="write members as BBG1 records")

    p = sub.add_parser("sample", help="draw random graphs")
    _add_common(p)
    p.add_argument("--method", choices=["chain", "rejection"], default="chain")
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--graphs", help="write samples as BBG1 records")

    p = sub.add_parser("spectra", help="spectral summaries of given or sampled graphs")
    _add_common(p)
    p.add_argument("--input", help="BBG1 file; otherwise --trials graphs are sampled")
    p.add_argument("--iterative", action="store_true", help="also run the deflated Lanczos route")

    p = sub.add_parser("sweep", help="desk-scale spectral sweeps")
    _add_common(p)
    p.add_argument("--kind", choices=["sigma2", "lambda-m"], default="sigma2")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--d1-grid", default="10,25,50", help="lambda-m: comma-separated d1 values")

    p = sub.add_parser("digraph", help="second singular value of random regular digraphs")
    _add_common(p, params=False)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--degrees", default="2,3,5")
    p.add_argument("--alpha", type=float, default=3.0)

    for name, text in [
        ("verify-switchings", "switching counts against their brackets"),
        ("verify-meta", "meta-graph degrees and completion"),
        ("verify-coupling", "coupled-step marginals and genuine-edge shares"),
        ("verify-concentration", "exact means, exact tails and light-couple means"),
        ("verify-discrepancy", "discrepancy property and heavy-couple bound"),
    ]:
        p = sub.add_parser(name, help=text)
        _add_common(p)
        if name == "verify-coupling":
            p.add_argument("--steps", type=int, default=100_000)
        if name == "verify-concentration":
            p.add_argument("--vectors", type=int, default=10_000)

    p = sub.add_parser("verify-all", help="every tiny-scale check over a parameter list")
    _add_common(p, params=False)
    p.add_argument("--params-list", help="e.g. '3,3,2,2;5,5,2,2' (default: built-in list)")
    p.add_argument("--grid")
    return ap


def _experiment_spec(args) -> dict:
    skip = {"out", "csv", "plot_data", "graphs", "func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _run_checks(args, fns) -> dict:
    results = []
    for raw in _grid(args):
        label = "(" + ",".join(map(str, raw)) + ")"
        try:
            p = check_margins(*raw)
        except BBGError as exc:
            results.append(CheckResult("params", label, "error",
                                       {"error": type(exc).__name__, "message": str(exc)}).to_dict())
            continue
        for name, fn in fns:
            results.append(_guard(lambda: fn(p), name, str(p)).to_dict())
    return make_report(args.command, _experiment_spec(args), args.seed, results)


def cmd_enumerate(args) -> dict:
    results, members = [], []
    for raw in _grid(args):
        fam = enumerate_family(raw)
        members.extend(fam.members)
        results.append(CheckResult("enumerate", str(fam.params), "pass", {"members": len(fam)}).to_dict())
    if args.graphs:
        Path(args.graphs).write_text(serialize_many(members))
    return make_report("enumerate", _experiment_spec(args), args.seed, results)


def cmd_sample(args) -> dict:
    results, graphs = [], []
    for gi, raw in enumerate(_grid(args)):
        p = check_margins(*raw)
        fracs = []
        for t in range(args.trials):
            s = derive_seed(args.seed, gi, t)
            if args.method == "chain":
                g, info = sample_uniform(p, ChainConfig(args.burn_in, s), return_stats=True)
                fracs.append(info["accept_fraction"])
            else:
                g = sample_rejection(p, np.random.default_rng(s))
            graphs.append(g)
        detail = {"samples": args.trials, "method": args.method}
        if fracs:
            detail["accept_fraction_mean"] = float(np.mean(fracs))
            detail["burn_in"] = ChainConfig(args.burn_in).steps_for(p)
        results.append(CheckResult("sample", str(p), "pass", detail).to_dict())
    if args.graphs:
        Path(args.graphs).write_text(serialize_many(graphs))
    return make_report("sample", _experiment_spec(args), args.seed, results)


def cmd_spectra(args) -> dict:
    if args.input:
        graphs = deserialize_many(Path(args.input).read_text())
    else:
        graphs = []
        for gi, raw in enumerate(_grid(args)):
            p = check_margins(*raw)
            graphs += [sample_uniform(p, ChainConfig(rng_seed=derive_seed(args.seed, gi, t)))
                       for t in range(args.trials)]
    results = []
    for g in graphs:
        s = spectral_summary(g, iterative=args.iterative)
        d1, d2 = g.params.d1, g.params.d2
        ok = abs(s.sigma[0] - math.sqrt(d1 * d2)) <= 1e-8
        if s.sigma2_iterative is not None:
            ok &= abs(s.sigma2_iterative - s.sigma2) <= 1e-8
        detail = {"sigma": s.sigma, "sigma2": s.sigma2, "lambda_M": s.lambda_M,
                  "sigma2_iterative": s.sigma2_iterative, "residuals": s.residuals}
        results.append(CheckResult("spectra", str(g.params), "pass" if ok else "fail", detail).to_dict())
    return make_report("spectra", _experiment_spec(args), args.seed, results)


def cmd_sweep(args) -> dict:
    if args.kind == "sigma2":
        return sweep_sigma2(_grid(args), args.trials, args.seed,
                            alpha=args.alpha if args.alpha is not None else 3.0)
    if args.n is None or args.d2 is None:
        raise BBGError("lambda-m sweeps need --n and --d2")
    return sweep_lambda_m(args.n, args.d2, _int_list(args.d1_grid), args.trials, args.seed,
                          alpha=args.alpha if args.alpha is not None else 4.0)


def cmd_digraph(args) -> dict:
    return run_digraph(args.n, _int_list(args.degrees), args.trials, args.seed, alpha=args.alpha)


def cmd_verify_all(args) -> dict:
    if args.params_list is not None:
        plist = _params_list(args.params_list)
    elif args.grid:
        plist = read_grid(args.grid)
    else:
        plist = DEFAULT_TINY
    return run_verify_all(plist, args.seed)


def _verify_fns(args):
    seed = args.seed
    c = args.command
    if c == "verify-switchings":
        return [("switching_counts", check_switching_counts)]
    if c == "verify-meta":
        return [("meta_graph_single", lambda p: check_meta_graph(p, False)),
                ("meta_graph_pair", lambda p: check_meta_graph(p, True))]
    if c == "verify-coupling":
        return [("coupling_single", lambda p: check_coupling(p, False, args.steps, seed)),
                ("coupling_pair", lambda p: check_coupling(p, True, args.steps, seed))]
    if c == "verify-concentration":
        return [("exact_means", check_exact_means),
                ("tails_f", lambda p: check_tails(p, "f", seed)),
                ("tails_g", lambda p: check_tails(p, "g", seed)),
                ("light_mean", lambda p: check_light_mean(p, args.vectors, seed))]
    if c == "verify-discrepancy":
        def dp(p):
            if p.n + p.m <= 24:
                return check_dp_family(p)
            return check_heavy_bound(p, seed)
        return [("discrepancy", dp)]
    raise BBGError(f"unknown command {c}")


COMMANDS = {
    "enumerate": cmd_enumerate,
    "sample": cmd_sample,
    "spectra": cmd_spectra,
    "sweep": cmd_sweep,
    "digraph": cmd_digraph,
    "verify-all": cmd_verify_all,
}


def _emit(args, report: dict):
    text = report_json(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        Path(args.csv).write_text(results_csv(report["results"]))
    if args.plot_data:
        d = Path(args.plot_data)
        d.mkdir(parents=True, exist_ok=True)
        for name, body in plot_data(report).items():
            (d / name).write_text(body)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in COMMANDS:
            report = COMMANDS[args.command](args)
        else:
            report = _run_checks(args, _verify_fns(args))
        _emit(args, report)
    except (BBGError, OSError, ValueError) as exc:
        print(f"bbg: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK if report["pass"] else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
