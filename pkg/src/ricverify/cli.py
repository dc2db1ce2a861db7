"""Command-line driver.

Exit status: 0 when every verdict passes, 2 when a verdict fails, 1 on bad
input (unreadable or malformed config, invalid parameters).
"""
import argparse
import os
import sys

import numpy as np

from . import deform, dwp, io, oracle, submersion
from .errors import PipelineFailed, RicVerifyError

MODES = ("sweep-canonical-variation", "verify-dwp", "build-functions", "cross-validate-oracle")

EPILOG = """\
config: JSON object with "schema_version": 1 and "mode".

modes and artifacts (CSV files start with '#' convention lines):

  sweep-canonical-variation
    keys: k; datum as "data" (serialized), "synthetic" {p, q, seed, ...},
          or "berger": true; optional t_grid, lambda_grid, n_random, tol
    sweep.csv    t, lambda, sample_id, margin, pass
    summary.json tau_estimate, pass_by_t, min_margin_by_t
    verdict: tau_estimate is not null

  verify-dwp
    keys: h, f ({"family": ..., params}), p, q, k, domain; optional n_points, tol
    lhs.csv      t, lhs1, lhs2, lhs3, lhs4
    verdict.json minima, relative_minima, passes
    verdict: all four inequalities hold strictly

  build-functions
    keys: p, q, k, delta, rho_prime; optional options, support_lemmas
    stage_<name>.csv   t, h, h1, h2, f, f1, f2  (one per stage)
    lhs.csv            t, lhs1, lhs2, lhs3, lhs4 (final stage)
    s_properties.csv   property, passed, informational
    verdict.json       parameters, minima, S properties, lemma audits
    verdict: final verification and every non-informational check pass

  cross-validate-oracle
    keys: optional t_values (default 0.1 0.25 0.5 1.0 1.3), tol
    oracle.csv   t, max_abs_diff, K_XY, K_XY_expected, K_XU, K_XU_expected
    report.json  per-t results
    verdict: every difference within tol
"""


def _datum(cfg, seed):
    if cfg.get("berger"):
        return oracle.berger_submersion_data()
    if "data" in cfg:
        return submersion.data_from_dict(cfg["data"])
    if "synthetic" in cfg:
        opts = dict(cfg["synthetic"])
        opts.setdefault("seed", seed)
        return submersion.synthetic_datum(**opts)
    raise io.SchemaError("sweep needs one of 'berger', 'data', 'synthetic'")


def run_sweep(cfg, out, seed, threads):
    io.require(cfg, "k")
    data = _datum(cfg, seed)
    kw = {"k": int(cfg["k"]), "seed": seed}
    for key in ("t_grid", "lambda_grid", "n_random", "tol"):
        if key in cfg:
            kw[key] = cfg[key]
    sweep = submersion.CanonicalVariationSweep(**kw)
    submersion.tau_scan(data, kw["k"], sweep, threads=threads)
    io.write_csv(os.path.join(out, "sweep.csv"), ("t", "lambda", "sample_id", "margin", "pass"),
                 submersion.sweep_rows(sweep))
    ok = sweep.tau_estimate is not None
    io.write_json(os.path.join(out, "summary.json"), {
        "mode": cfg["mode"],
        "label": data.label,
        "p": data.p,
        "q": data.q,
        "k": sweep.k,
        "seed": seed,
        "tau_estimate": sweep.tau_estimate,
        "t_grid": sweep.t_grid,
        "pass_by_t": sweep.pass_by_t,
        "min_margin_by_t": sweep.min_margin_by_t,
        "verdict": ok,
    })
    return ok


def run_verify_dwp(cfg, out, seed, threads):
    io.require(cfg, "h", "f", "p", "q", "k", "domain")
    w = dwp.warp_pair_from_config(cfg)
    rep = dwp.verify_on_grid(w, int(cfg["k"]), n_points=int(cfg.get("n_points", 1000)),
                             tol=float(cfg.get("tol", dwp.DWP_TOL)))
    io.write_csv(os.path.join(out, "lhs.csv"), ("t", "lhs1", "lhs2", "lhs3", "lhs4"), dwp.report_rows(rep))
    io.write_json(os.path.join(out, "verdict.json"), {
        "mode": cfg["mode"],
        "p": w.p,
        "q": w.q,
        "k": int(cfg["k"]),
        "minima": rep.minima,
        "relative_minima": rep.relative_minima,
        "passes": rep.passes(),
        "verdict": rep.verdict,
    })
    return rep.verdict


def _stage_rows(state, grid):
    lo, hi = state.f.domain
    g = grid[(grid > lo) & (grid < hi)]
    cols = [state.h(g, j) for j in range(3)] + [state.f(g, j) for j in range(3)]
    return [(io.fmt(t),) + tuple(io.fmt(c[i]) for c in cols) for i, t in enumerate(g)]


def run_build_functions(cfg, out, seed, threads):
    io.require(cfg, "p", "q", "k", "delta", "rho_prime")
    args = (int(cfg["p"]), int(cfg["q"]), int(cfg["k"]), float(cfg["delta"]), float(cfg["rho_prime"]))
    options = cfg.get("options")
    try:
        state = deform.build_state(*args, options)
    except PipelineFailed as exc:
        io.write_json(os.path.join(out, "verdict.json"), {
            "mode": cfg["mode"], "failed_stage": exc.stage, "message": str(exc), "verdict": False,
        })
        return False
    grid = deform.pipeline_grid(state, state.options["grid_points"])
    for stage in deform.STAGES:
        st = state if stage == "final" else deform.build_state(*args, options, until=stage)
        io.write_csv(os.path.join(out, f"stage_{stage}.csv"), ("t", "h", "h1", "h2", "f", "f1", "f2"),
                     _stage_rows(st, grid))
    rep = deform.final_report(state, grid)
    io.write_csv(os.path.join(out, "lhs.csv"), ("t", "lhs1", "lhs2", "lhs3", "lhs4"), dwp.report_rows(rep))
    props = deform.check_S_properties(state)
    io.write_csv(os.path.join(out, "s_properties.csv"), ("property", "passed", "informational"),
                 [(k, int(v), int(k in props.informational)) for k, v in sorted(props.results.items())])
    payload = {
        "mode": cfg["mode"],
        "parameters": dict(zip(("p", "q", "k", "delta", "rho_prime"), args)),
        "t2": state.t2,
        "t3": state.t3,
        "a": state.a,
        "lambda_t2": state.lambda_t2,
        "eps": state.eps,
        "delta_phi": state.delta_phi,
        "minima": rep.minima,
        "relative_minima": rep.relative_minima,
        "passes": rep.passes(),
        "s_properties": props.results,
        "s_details": props.details,
    }
    ok = rep.verdict and props.passed
    if cfg.get("support_lemmas", True):
        lem = deform.check_support_lemmas(state, seed=seed)
        payload["support_lemmas"] = lem.results
        payload["support_details"] = lem.details
        ok = ok and lem.passed
    payload["verdict"] = ok
    io.write_json(os.path.join(out, "verdict.json"), payload)
    return ok


def berger_comparison(t_values=(0.1, 0.25, 0.5, 1.0, 1.3)):
    """Per-t ``(t, max_abs_diff, K_XY, 4 - 3t, K_XU, t)`` against the Lie oracle."""
    data = oracle.berger_submersion_data()
    rows = []
    for t in t_values:
        mine = submersion.assemble_gt_unit(data, t).comp
        ref = oracle.curvature_from_connection(oracle.berger(t)).comp
        diff = float(np.max(np.abs(mine - ref)))
        # vertical index 0, horizontal 1, 2
        rows.append((float(t), diff, float(mine[1, 2, 1, 2]), 4.0 - 3.0 * t, float(mine[1, 0, 1, 0]), float(t)))
    return rows


def run_oracle(cfg, out, seed, threads):
    tol = float(cfg.get("tol", 1e-10))
    rows = berger_comparison(tuple(cfg.get("t_values", (0.1, 0.25, 0.5, 1.0, 1.3))))
    ok = all(r[1] <= tol and abs(r[2] - r[3]) <= tol and abs(r[4] - r[5]) <= tol for r in rows)
    cols = ("t", "max_abs_diff", "K_XY", "K_XY_expected", "K_XU", "K_XU_expected")
    io.write_csv(os.path.join(out, "oracle.csv"), cols, [tuple(io.fmt(x) for x in r) for r in rows])
    io.write_json(os.path.join(out, "report.json"), {
        "mode": cfg["mode"],
        "tol": tol,
        "rows": [dict(zip(cols, r)) for r in rows],
        "verdict": ok,
    })
    return ok


RUNNERS = {
    "sweep-canonical-variation": run_sweep,
    "verify-dwp": run_verify_dwp,
    "build-functions": run_build_functions,
    "cross-validate-oracle": run_oracle,
}


def build_parser():
    ap = argparse.ArgumentParser(
        prog="ricverify",
        description="Numerical verification of positive intermediate Ricci curvature.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("--config", required=True, help="JSON experiment config")
    ap.add_argument("--out", default="out", help="output directory (default: out)")
    ap.add_argument("--seed", type=int, default=None, help="seed (overrides the config's 'seed')")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker threads (default: $RICVERIFY_THREADS or the CPU count)")
    return ap


def run(cfg, out, seed=None, threads=None):
    """Run a loaded config; returns the exit status."""
    seed = int(cfg.get("seed", 0)) if seed is None else int(seed)
    if not 0 <= seed < 2**64:
        raise io.SchemaError("seed must be an unsigned 64-bit integer")
    io.ensure_dir(out)
    ok = RUNNERS[cfg["mode"]](cfg, out, seed, threads)
    return 0 if ok else 2


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = io.load_config(args.config, MODES)
        status = run(cfg, args.out, args.seed, args.threads)
    except (RicVerifyError, TypeError, ValueError, KeyError) as exc:
        print(f"ricverify: error: {exc}", file=sys.stderr)
        return 1
    print(f"ricverify: {cfg['mode']}: {'pass' if status == 0 else 'FAIL'}")
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
