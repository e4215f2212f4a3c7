"""Experiment sweeps and verification suites behind the ``bbg`` command.

Every check returns a :class:`CheckResult`; reports wrap lists of them in a
versioned JSON envelope. Randomness is derived from the run seed and the
position in the grid, so identical inputs give byte-identical reports whatever
the worker count.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import stats

from . import __version__
from .coupling import (
    build_meta_graph,
    complete_meta_graph,
    empirical_in_b,
    in_b_lower_bounds,
)
from .discrepancy import dp_check, dp_params, heavy_sum, source_matrix
from .errors import BBGError, DegenerateRegime, DomainError
from .graph_core import DegreeParams
from .linstat import (
    WHICH,
    conc_params,
    exact_family_statistics,
    exact_tail_probability,
    light_mean_check,
    random_rational_q,
    tail_bound,
)
from .oracle import (
    EdgeConstraint,
    check_margins,
    codegree_means,
    count_family,
    edge_means,
    enumerate_family,
    enumerate_permuted,
)
from .sampler import (
    ChainConfig,
    RNG_ALGORITHM,
    matrix_keys,
    sample_many_matrices,
    sample_rejection_matrices,
    sample_uniform,
)
from .spectra import digraph_sigma2, lambda_M, sigma2_dense
from .switching import anchor_kinds, count_switchings

SCHEMA = "bbg-report/1"
DEFAULT_TINY = [(2, 2, 1, 1), (3, 3, 2, 2), (4, 4, 2, 2), (5, 5, 2, 2), (2, 3, 3, 2)]
P_THRESHOLD = 1e-3


@dataclass
class CheckResult:
    check: str
    params: str
    status: str  # pass | fail | skip | error
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "skip")

    def to_dict(self) -> dict:
        return asdict(self)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("BBG_THREADS", "1")))
    except ValueError:
        return 1


def derive_seed(seed: int, *path: int) -> int:
    """64-bit seed for a grid point / trial, independent of scheduling."""
    return int(np.random.SeedSequence([int(seed), *map(int, path)]).generate_state(1, np.uint64)[0])


def make_report(command: str, spec: dict, seed: int, results: list, extra: dict | None = None) -> dict:
    ok = all(r["status"] in ("pass", "skip") for r in results) if results else True
    rep = {
        "schema": SCHEMA,
        "version": __version__,
        "command": command,
        "spec": spec,
        "seed": int(seed),
        "rng": RNG_ALGORITHM,
        "results": results,
        "pass": ok,
    }
    if extra:
        rep.update(extra)
    return rep


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def results_csv(results: Sequence[dict]) -> str:
    """``check,params,status,detail`` with the detail as compact JSON."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "params", "status", "detail"])
    for r in results:
        w.writerow([r["check"], r["params"], r["status"],
                    json.dumps(r["detail"], sort_keys=True, default=_json_default)])
    return buf.getvalue()


def _map(fn: Callable, jobs: list, workers: int | None = None) -> list:
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _as_params(p) -> DegreeParams:
    return p if isinstance(p, DegreeParams) else check_margins(*p)


# --- oracle-level checks -------------------------------------------------------------


def check_enumeration(params, seed: int = 0) -> CheckResult:
    fam = enumerate_family(params)
    dp = count_family(fam.params)
    perm = enumerate_permuted(fam.params, np.random.default_rng(derive_seed(seed, 1)))
    ok = len(fam) == dp and perm == {g.key for g in fam}
    return CheckResult("enumeration", str(fam.params), _status(ok),
                       {"members": len(fam), "dp_count": dp, "permuted_match": perm == {g.key for g in fam}})


def check_family_ratios(params) -> CheckResult:
    fam = enumerate_family(params)
    p = fam.params
    n, m, d1, d2 = p.as_tuple()
    N = len(fam)
    X = fam.matrices.astype(np.int64)
    single = X.sum(axis=0)
    want1 = Fraction(d2, n)
    bad = [(u, v) for u in range(n) for v in range(m) if Fraction(int(single[u, v]), N) != want1]
    bad2 = []
    want2 = Fraction(d2 * (d2 - 1), n * (n - 1)) if n > 1 else None
    if n > 1:
        pair = np.einsum("kuv,kwv->uwv", X, X)
        for u1, u2 in itertools.permutations(range(n), 2):
            for v in range(m):
                if Fraction(int(pair[u1, u2, v]), N) != want2:
                    bad2.append((u1, u2, v))
    # independent route: constrained enumeration at one anchor of each kind
    direct1 = Fraction(len(enumerate_family(p, EdgeConstraint.single(0, 0))), N)
    direct2 = Fraction(len(enumerate_family(p, EdgeConstraint.pair(0, 1, 0))), N) if n > 1 else None
    ok = not bad and not bad2 and direct1 == want1 and direct2 == want2
    return CheckResult("family_ratio", str(p), _status(ok), {
        "single": str(want1), "pair": str(want2), "single_mismatches": bad[:5], "pair_mismatches": bad2[:5],
        "constrained_single": str(direct1), "constrained_pair": str(direct2)})


def check_switching_counts(params) -> CheckResult:
    fam = enumerate_family(params)
    p = fam.params
    violations = []
    ranges: dict[str, list[int]] = {}
    for g in fam:
        anchors = [(u, v) for u in range(p.n) for v in range(p.m)]
        anchors += [(u1, u2, v) for u1, u2 in itertools.permutations(range(p.n), 2) for v in range(p.m)]
        for a in anchors:
            for kind in anchor_kinds(g, a):
                c = count_switchings(g, a, kind)
                r = ranges.setdefault(kind.value, [c.value, c.value, c.lower_bound, c.upper_bound])
                r[0] = min(r[0], c.value)
                r[1] = max(r[1], c.value)
                if not c.within and len(violations) < 5:
                    violations.append({"graph": list(g.key), "anchor": a, "kind": kind.value,
                                       "value": c.value, "bounds": [c.lower_bound, c.upper_bound]})
    return CheckResult("switching_counts", str(p), _status(not violations),
                       {"observed_min_max_and_bounds": ranges, "violations": violations})


def check_meta_graph(params, pair_mode: bool) -> CheckResult:
    p = _as_params(params)
    if pair_mode and p.n < 2:
        return CheckResult("meta_graph_pair", str(p), "skip", {"reason": "pair mode needs n >= 2"})
    anchor = (0, 1, 0) if pair_mode else (0, 0)
    g0 = build_meta_graph(p, anchor, pair_mode)
    L, R = g0.left_degrees(True), g0.right_degrees(True)
    br = g0.degree_brackets()
    in_br = bool(((L >= br["left"][0]) & (L <= br["left"][1])).all()
                 and ((R >= br["right"][0]) & (R <= br["right"][1])).all())
    g = complete_meta_graph(g0)
    w = g.weights
    exact = bool((g.left_degrees() == w.left_target).all() and (g.right_degrees() == w.right_target).all())
    identity = len(g.left_family) * w.left_target == len(g.right_family) * w.right_target
    name = "meta_graph_pair" if pair_mode else "meta_graph_single"
    return CheckResult(name, str(p), _status(in_br and exact and identity), {
        "anchor": anchor,
        "left_range": [int(L.min()), int(L.max())] if len(L) else [],
        "right_range": [int(R.min()), int(R.max())] if len(R) else [],
        "brackets": br, "completed_exact": exact, "weight_identity": identity,
        "left_size": len(g.left_family), "right_size": len(g.right_family),
        "targets": [w.left_target, w.right_target]})


def check_coupling(params, pair_mode: bool, steps: int = 100_000, seed: int = 0) -> CheckResult:
    """Exact conditional in-B shares on the completed meta-graph, plus a simulated walk."""
    p = _as_params(params)
    name = "coupling_pair" if pair_mode else "coupling_single"
    if pair_mode and p.n < 2:
        return CheckResult(name, str(p), "skip", {"reason": "pair mode needs n >= 2"})
    anchor = (0, 1, 0) if pair_mode else (0, 0)
    meta = complete_meta_graph(build_meta_graph(p, anchor, pair_mode))
    w = meta.weights
    if len(meta.right_family) == 0 or w.right_target == 0:
        return CheckResult(name, str(p), "skip", {"reason": "constrained family empty or zero weights"})
    b_target, b_source = in_b_lower_bounds(p, pair_mode)
    exact_t = meta.right_degrees(True) / w.right_target
    exact_s = meta.left_degrees(True) / w.left_target
    exact_ok = bool(exact_t.min() >= b_target - 1e-15 and exact_s.min() >= b_source - 1e-15)
    rng = np.random.default_rng(derive_seed(seed, 5, int(pair_mode)))
    src, tgt, inb = empirical_in_b(meta, steps, rng)
    R = len(meta.right_family)
    counts = np.bincount(tgt, minlength=R)
    pval = float(stats.chisquare(counts).pvalue) if R > 1 else 1.0
    # conditional frequencies, aggregated over all targets / sources
    freq_t = float(inb.mean())
    se = math.sqrt(max(freq_t * (1 - freq_t), 1e-12) / steps)
    sim_ok = freq_t >= b_target - 3 * se and freq_t >= b_source - 3 * se
    # per-target frequencies where enough visits accumulate
    per_t_ok = True
    for j in range(R):
        mask = tgt == j
        k = int(mask.sum())
        if k >= 100:
            f = float(inb[mask].mean())
            s = math.sqrt(max(f * (1 - f), 1.0 / k) / k)
            per_t_ok &= f >= b_target - 3 * s
    ok = exact_ok and pval > P_THRESHOLD and sim_ok and per_t_ok
    return CheckResult(name, str(p), _status(ok), {
        "anchor": anchor, "bound_given_target": b_target, "bound_given_source": b_source,
        "exact_min_given_target": float(exact_t.min()), "exact_min_given_source": float(exact_s.min()),
        "steps": steps, "chi_square_p": pval, "in_B_frequency": freq_t, "per_target_ok": bool(per_t_ok)})


def check_exact_means(params) -> CheckResult:
    fam = enumerate_family(params)
    p = fam.params
    em = edge_means(fam)
    want = Fraction(p.d1, p.m)
    ok1 = all(x == want for row in em for x in row)
    ok2 = True
    want2 = None
    if p.n > 1:
        cm = codegree_means(fam)
        want2 = Fraction(p.d1 * (p.d2 - 1), p.n - 1)
        ok2 = all(cm[u][w] == want2 for u in range(p.n) for w in range(p.n) if u != w)
    return CheckResult("exact_means", str(p), _status(ok1 and ok2),
                       {"edge_mean": str(want), "codegree_mean": str(want2)})


def check_tails(params, mode: str, seed: int = 0, q_count: int = 10, grid_points: int = 20) -> CheckResult:
    fam = enumerate_family(params)
    p = fam.params
    name = f"tails_{mode}"
    shape = (p.n, p.m) if mode == "f" else (p.n, p.n)
    rng = np.random.default_rng(derive_seed(seed, 7, ord(mode)))
    try:
        conc_params(p, np.zeros(shape), mode)
    except DegenerateRegime as exc:
        return CheckResult(name, str(p), "skip", {"reason": str(exc)})
    worst = None
    violations = []
    checked = 0
    for _ in range(q_count):
        Q = random_rational_q(rng, shape, symmetric=(mode == "g"))
        a = max(Q.ravel())
        if a == 0:
            a = Fraction(1)
        cp = conc_params(p, Q, mode, exact=True)
        st = exact_family_statistics(fam, Q, mode)
        span = Fraction(int(st.numerators.max() - st.numerators.min()), st.denominator)
        t_grid = [span * k / (grid_points - 1) + Fraction(k, grid_points) for k in range(grid_points)]
        for t in t_grid:
            for w in WHICH:
                pr = exact_tail_probability(st, cp, t, w)
                b = tail_bound(cp, float(a), float(t), w)
                checked += 1
                gap = float(pr) - b
                worst = gap if worst is None else max(worst, gap)
                if pr > b and len(violations) < 5:
                    violations.append({"which": w, "t": str(t), "probability": str(pr), "bound": b})
    return CheckResult(name, str(p), _status(not violations),
                       {"comparisons": checked, "max_probability_minus_bound": worst, "violations": violations})


def _random_unit_pair(rng, n: int, m: int, sparse: bool):
    if sparse:
        x = np.zeros(n)
        kx = int(rng.integers(1, n + 1))
        x[rng.choice(n, kx, replace=False)] = rng.standard_normal(kx)
        y = np.zeros(m)
        ky = int(rng.integers(2, m + 1))
        y[rng.choice(m, ky, replace=False)] = rng.standard_normal(ky)
    else:
        x = rng.standard_normal(n)
        y = rng.standard_normal(m)
    if not x.any():
        x[0] = 1.0
    support = y != 0
    y[support] -= y[support].mean()
    x /= np.linalg.norm(x)
    nrm = np.linalg.norm(y)
    if nrm == 0:
        y = np.zeros(m)
        y[0], y[1] = 1, -1
        nrm = math.sqrt(2)
    y /= nrm
    y -= y.mean()  # remove rounding residue
    y /= np.linalg.norm(y)
    return x, y


def check_light_mean(params, count: int = 10_000, seed: int = 0) -> CheckResult:
    p = _as_params(params)
    if p.m < 2:
        return CheckResult("light_mean", str(p), "skip", {"reason": "needs m >= 2 for mean-zero y"})
    rng = np.random.default_rng(derive_seed(seed, 11))
    worst = 0.0
    bad = 0
    for k in range(count):
        x, y = _random_unit_pair(rng, p.n, p.m, sparse=bool(k % 2))
        value, ok = light_mean_check(x, y, p)
        worst = max(worst, abs(value))
        bad += not ok
    return CheckResult("light_mean", str(p), _status(bad == 0),
                       {"vectors": count, "max_abs_value": worst, "bound": math.sqrt(p.d1), "violations": bad})


def check_dp_family(params, K: float = 1.0) -> CheckResult:
    fam = enumerate_family(params)
    p = fam.params
    try:
        dp = dp_params(p, K, "X")
    except DomainError as exc:
        return CheckResult("dp_exhaustive", str(p), "skip", {"reason": str(exc)})
    if p.n + p.m > 24:
        return CheckResult("dp_exhaustive", str(p), "skip", {"reason": "n + m exceeds the exhaustive cap"})
    for g in fam:
        holds, wit = dp_check(source_matrix(g, "X"), dp)
        if not holds:
            return CheckResult("dp_exhaustive", str(p), "fail",
                               {"graph": list(g.key), "witness": asdict(wit)})
    return CheckResult("dp_exhaustive", str(p), "pass", {"members": len(fam), "K": K, "kappa1": dp.kappa1})


def check_heavy_bound(params, seed: int = 0, instances: int = 2, vectors: int = 1000,
                      subset_trials: int = 10_000, K: float = 1.0) -> CheckResult:
    p = _as_params(params)
    out = {"instances": [], "vectors": vectors}
    ok = True
    for i in range(instances):
        g = sample_uniform(p, ChainConfig(rng_seed=derive_seed(seed, 13, i)))
        rng = np.random.default_rng(derive_seed(seed, 14, i))
        entry = {}
        for mode in ("X", "M"):
            dp = dp_params(p, K, mode)
            holds, wit = dp_check(source_matrix(g, mode), dp, "sampled", trials=subset_trials, rng=rng)
            entry[f"dp_{mode}"] = holds
            if not holds:
                entry[f"witness_{mode}"] = asdict(wit)
                continue  # the heavy bound is conditional on the property
            worst, bad = 0.0, 0
            for k in range(vectors):
                x, y = _random_unit_pair(rng, p.n, p.m, sparse=bool(k % 2))
                if mode == "M":
                    x = x - x.mean()
                    x /= np.linalg.norm(x)
                    x -= x.mean()
                    x /= np.linalg.norm(x)
                value, fine = heavy_sum(g, x, y, dp)
                worst = max(worst, abs(value))
                bad += not fine
            scale = math.sqrt(p.d1) if mode == "X" else math.sqrt(p.d1 * (p.d2 - 1))
            entry[f"heavy_{mode}"] = {"max_abs": worst, "bound": dp.alpha0 * scale, "violations": bad}
            ok &= bad == 0
        out["instances"].append(entry)
    verified = sum(e["dp_X"] and e["dp_M"] for e in out["instances"])
    return CheckResult("heavy_bound", str(p), _status(ok and verified > 0), out)


def family_counts(fam, mats: np.ndarray) -> np.ndarray:
    idx = fam.index
    return np.bincount([idx[k] for k in matrix_keys(mats)], minlength=len(fam))


def check_sampler(params, seed: int = 0, per_member: int = 100, min_samples: int = 6000) -> CheckResult:
    fam = enumerate_family(params)
    p = fam.params
    N = len(fam)
    count = max(min_samples, per_member * N)
    chain = family_counts(fam, sample_many_matrices(p, count, ChainConfig(rng_seed=derive_seed(seed, 17))))
    rej = family_counts(fam, sample_rejection_matrices(p, count, np.random.default_rng(derive_seed(seed, 19))))
    if N == 1:
        return CheckResult("sampler_uniformity", str(p), "pass", {"members": 1, "samples": count})
    p_chain = float(stats.chisquare(chain).pvalue)
    p_rej = float(stats.chisquare(rej).pvalue)
    table = np.vstack([chain, rej])
    table = table[:, table.sum(0) > 0]
    p_two = float(stats.chi2_contingency(table).pvalue)
    ok = min(p_chain, p_rej, p_two) > P_THRESHOLD
    return CheckResult("sampler_uniformity", str(p), _status(ok), {
        "members": N, "samples": count, "p_chain": p_chain, "p_rejection": p_rej, "p_two_sample": p_two})


# --- composite runs ---------------------------------------------------------------------


def _guard(fn: Callable[[], CheckResult], name: str, label: str) -> CheckResult:
    try:
        return fn()
    except BBGError as exc:
        return CheckResult(name, label, "error", {"error": type(exc).__name__, "message": str(exc)})


def verify_params(raw, seed: int = 0, *, light_vectors: int = 10_000, coupling_steps: int = 100_000) -> list[CheckResult]:
    label = "(" + ",".join(str(x) for x in raw) + ")"
    try:
        p = check_margins(*raw)
    except BBGError as exc:
        return [CheckResult("params", label, "error", {"error": type(exc).__name__, "message": str(exc)})]
    label = str(p)
    checks = [
        ("enumeration", lambda: check_enumeration(p, seed)),
        ("family_ratio", lambda: check_family_ratios(p)),
        ("switching_counts", lambda: check_switching_counts(p)),
        ("meta_graph_single", lambda: check_meta_graph(p, False)),
        ("meta_graph_pair", lambda: check_meta_graph(p, True)),
        ("coupling_single", lambda: check_coupling(p, False, coupling_steps, seed)),
        ("coupling_pair", lambda: check_coupling(p, True, coupling_steps, seed)),
        ("exact_means", lambda: check_exact_means(p)),
        ("tails_f", lambda: check_tails(p, "f", seed)),
        ("tails_g", lambda: check_tails(p, "g", seed)),
        ("light_mean", lambda: check_light_mean(p, light_vectors, seed)),
        ("dp_exhaustive", lambda: check_dp_family(p)),
        ("sampler_uniformity", lambda: check_sampler(p, seed)),
    ]
    return [_guard(fn, name, label) for name, fn in checks]


def run_verify_all(params_list: Iterable = DEFAULT_TINY, seed: int = 0, **kw) -> dict:
    params_list = [tuple(int(x) for x in p) for p in params_list]
    results = []
    for raw in params_list:
        results.extend(r.to_dict() for r in verify_params(raw, seed, **kw))
    return make_report("verify-all", {"params": [list(p) for p in params_list]}, seed, results)


# --- desk-scale sweeps -------------------------------------------------------------------


def alon_boppana_floor(params: DegreeParams) -> float:
    return (math.sqrt(params.d1 - 1) + math.sqrt(params.d2 - 1)) / math.sqrt(params.d1)


def _sigma2_job(job):
    raw, seed, gi, trial = job
    p = DegreeParams(*raw)
    g = sample_uniform(p, ChainConfig(rng_seed=derive_seed(seed, gi, trial)))
    return sigma2_dense(g) / math.sqrt(p.d1)


def sweep_sigma2(grid: Sequence, trials: int, seed: int = 0, *, alpha: float = 3.0,
                 floor_slack: float = 0.2, workers: int | None = None) -> dict:
    """Second singular value over the sampled graphs of each grid point, relative to ``sqrt(d1)``."""
    grid = [_as_params(g) for g in grid]
    jobs = [(p.as_tuple(), seed, gi, t) for gi, p in enumerate(grid) for t in range(trials)]
    ratios = _map(_sigma2_job, jobs, workers)
    results = []
    for gi, p in enumerate(grid):
        r = ratios[gi * trials:(gi + 1) * trials]
        floor = alon_boppana_floor(p)
        complete = p.d1 == p.m
        ok = all(x <= alpha for x in r) and (complete or not r or max(r) >= floor - floor_slack)
        results.append(CheckResult("sigma2_ratio", str(p), _status(ok), {
            "ratios": r, "max": max(r) if r else None, "mean": float(np.mean(r)) if r else None,
            "floor": floor, "alpha": alpha, "floor_slack": floor_slack}).to_dict())
    return make_report("sweep", {"kind": "sigma2", "grid": [list(p.as_tuple()) for p in grid],
                                 "trials": trials}, seed, results)


def _lambda_job(job):
    raw, seed, gi, trial = job
    p = DegreeParams(*raw)
    g = sample_uniform(p, ChainConfig(rng_seed=derive_seed(seed, gi, trial)))
    return lambda_M(g) / math.sqrt(p.d1)


def sweep_lambda_m(n: int, d2: int, d1_grid: Sequence[int], trials: int, seed: int = 0, *,
                   alpha: float = 4.0, workers: int | None = None) -> dict:
    """lambda(M) over sampled graphs with ``d2`` fixed, relative to ``sqrt(d1)``."""
    grid = []
    for d1 in d1_grid:
        if (n * d1) % d2:
            raise DomainError(f"n*d1 = {n * d1} is not divisible by d2 = {d2}")
        grid.append(check_margins(n, n * d1 // d2, d1, d2))
    jobs = [(p.as_tuple(), seed, gi, t) for gi, p in enumerate(grid) for t in range(trials)]
    vals = _map(_lambda_job, jobs, workers)
    results = []
    for gi, p in enumerate(grid):
        r = vals[gi * trials:(gi + 1) * trials]
        detail = {"ratios": r, "max": max(r) if r else None, "mean": float(np.mean(r)) if r else None,
                  "alpha": alpha}
        if p.d1 == p.m:
            detail["degenerate"] = "complete bipartite"
        results.append(CheckResult("lambda_m_ratio", str(p), _status(all(x <= alpha for x in r)), detail).to_dict())
    return make_report("sweep", {"kind": "lambda-m", "n": n, "d2": d2, "d1_grid": list(d1_grid),
                                 "trials": trials}, seed, results)


def _digraph_job(job):
    raw, seed, gi, trial = job
    p = DegreeParams(*raw)
    g = sample_uniform(p, ChainConfig(rng_seed=derive_seed(seed, gi, trial)))
    return digraph_sigma2(g)


def run_digraph(n: int, degrees: Sequence[int], trials: int, seed: int = 0, *, alpha: float = 3.0,
                workers: int | None = None) -> dict:
    grid = [check_margins(n, n, d, d) for d in degrees]
    jobs = [(p.as_tuple(), seed, gi, t) for gi, p in enumerate(grid) for t in range(trials)]
    vals = _map(_digraph_job, jobs, workers)
    results = []
    for gi, p in enumerate(grid):
        r = vals[gi * trials:(gi + 1) * trials]
        s2 = [a for a, _ in r]
        l2 = [b for _, b in r]
        bound_ok = all(s <= alpha * math.sqrt(p.d1) for s in s2)
        weyl_ok = all(b <= s + 1e-8 for s, b in r)
        results.append(CheckResult("digraph", str(p), _status(bound_ok and weyl_ok), {
            "sigma2": s2, "abs_lambda2": l2, "alpha": alpha, "bound": alpha * math.sqrt(p.d1),
            "weyl_ok": weyl_ok}).to_dict())
    return make_report("digraph", {"n": n, "degrees": list(degrees), "trials": trials}, seed, results)


def plot_data(report: dict) -> dict[str, str]:
    """Two-column text files (``name -> contents``) for external plotting tools."""
    files = {}
    for k, r in enumerate(report.get("results", [])):
        d = r.get("detail", {})
        stem = f"{k:03d}_{r['check']}_{r['params'].strip('()').replace(',', '-')}"
        for key in ("ratios", "sigma2"):
            if isinstance(d.get(key), list):
                files[f"{stem}_{key}.txt"] = "".join(f"{i} {v!r}\n" for i, v in enumerate(d[key]))
        if isinstance(d.get("records"), list):
            files[f"{stem}_bound.txt"] = "".join(f"{x['t']!r} {x['bound']!r}\n" for x in d["records"])
            files[f"{stem}_empirical.txt"] = "".join(f"{x['t']!r} {x['empirical']!r}\n" for x in d["records"])
    return files
