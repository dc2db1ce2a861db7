"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Runtime limits are part of the criteria and are checked with wall-clock time.
"""
import time

import numpy as np

from ricverify.deform import check_S_properties, check_support_lemmas, final_report, pipeline_grid, run_pipeline
from ricverify.dwp import WarpPair, verify_on_grid
from ricverify.functions import Cosine, Linear, Sine
from ricverify.oracle import berger, berger_submersion_data, curvature_from_connection, product_tensor, sphere_tensor
from ricverify.spectral import brute_force_min_subset_sum, sum_smallest
from ricverify.submersion import (
    assemble_gt_unit,
    block_scaling_audit,
    default_t_grid,
    product_datum,
    synthetic_datum,
    tau_scan,
)
from ricverify.tensor import frame_and_random_sample, ric_k_scan


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_1_spectral_oracle(acceptance):
    rng = np.random.default_rng(2024)
    worst = 0.0
    with Clock() as clock:
        for _ in range(1000):
            n = int(rng.integers(3, 10))
            a = rng.standard_normal((n, n))
            A = 0.5 * (a + a.T)
            for m in range(1, n + 1):
                worst = max(worst, abs(sum_smallest(A, m) - brute_force_min_subset_sum(A, m)))
    ok = worst <= 1e-10 and clock.elapsed < 10
    acceptance(1, ok, f"1000 matrices, max |diff| = {worst:.2e} (tol 1e-10), {clock.elapsed:.2f} s (limit 10 s)")
    assert ok


def test_criterion_2_berger_against_lie_oracle(acceptance):
    data = berger_submersion_data()
    worst, worst_k = 0.0, 0.0
    with Clock() as clock:
        for t in (0.1, 0.25, 0.5, 1.0, 1.3):
            mine = assemble_gt_unit(data, t).comp
            ref = curvature_from_connection(berger(t)).comp
            worst = max(worst, float(np.max(np.abs(mine - ref))))
            # vertical index 0, horizontal 1, 2
            worst_k = max(worst_k, abs(mine[1, 2, 1, 2] - (4 - 3 * t)), abs(mine[1, 0, 1, 0] - t))
    ok = worst <= 1e-10 and worst_k <= 1e-10 and clock.elapsed < 1
    acceptance(2, ok, f"max |diff| = {worst:.2e}, K(X,Y) and K(X,U) errors {worst_k:.2e} (tol 1e-10), "
                      f"{clock.elapsed:.3f} s (limit 1 s)")
    assert ok


def test_criterion_3_block_orders(acceptance):
    t_list = np.geomspace(1e-1, 1e-4, 7)
    data = [("berger", berger_submersion_data())] + [
        (f"synthetic[{s}]", synthetic_datum(2 + s % 2, 3 + s % 3, seed=s)) for s in range(5)
    ]
    orders = {"vertical": 0.9, "offdiag": 0.4, "lambda": 0.9}
    lines, ok = [], True
    with Clock() as clock:
        for label, d in data:
            rep = block_scaling_audit(d, t_list)
            for f in rep.fits:
                key = f.name.split("[")[0]
                if key not in orders:
                    continue
                good = f.status == "exact" or (f.status == "fit" and f.exponent >= orders[key])
                ok &= good
                if not good:
                    lines.append(f"{label}:{f.name}={f.exponent}")
            worst = min(f.exponent for f in rep.fits if f.status == "fit" and f.name.split("[")[0] in orders)
            lines.append(f"{label} min {worst:.3f}")
    ok = ok and clock.elapsed < 30
    acceptance(3, ok, f"exponents vs (0.9, 0.4, 0.9): {'; '.join(lines)}, {clock.elapsed:.2f} s (limit 30 s)")
    assert ok


# (p, q, k_1, k_2) with p the fibre dimension; the fibre carries Ric_{k_1}
# and the base Ric_{k_2}, so the threshold is max(k_2 + p, k_1 + q)
THRESHOLD_CASES = [(3, 4, 1, 1), (2, 2, 1, 1), (3, 3, 2, 2), (2, 5, 1, 2), (4, 3, 1, 1)]


def test_criterion_4_tau_at_threshold(acceptance):
    parts, ok = [], True
    with Clock() as clock:
        for seed, (p, q, k1, k2) in enumerate(THRESHOLD_CASES):
            k = max(k2 + p, k1 + q)
            scan = tau_scan(synthetic_datum(p, q, seed=seed), k)
            tau = scan.tau_estimate
            ok &= tau is not None and tau > 0
            parts.append(f"({p},{q},{k1},{k2}) k={k} tau={tau:.3g}" if tau else f"({p},{q},{k1},{k2}) k={k} tau=None")
    ok = ok and clock.elapsed < 120
    acceptance(4, ok, f"{'; '.join(parts)}, {clock.elapsed:.2f} s (limit 120 s)")
    assert ok


def test_criterion_5_product_exactness(acceptance):
    parts, ok = [], True
    base = sphere_tensor(4)
    samples = frame_and_random_sample(7, 256, seed=0)
    with Clock() as clock:
        for rho in (1.0, 0.1, 0.01):
            fib = sphere_tensor(3, rho)
            d = product_datum(fib, base)
            worst = 0.0
            for t in default_t_grid():
                ref = product_tensor(fib * (1 / t), base).comp
                got = assemble_gt_unit(d, t).comp
                worst = max(worst, float(np.max(np.abs(got - ref)) / max(1.0, np.max(np.abs(ref)))))
            P = product_tensor(fib, base)
            scale = float(np.max(np.abs(P.comp)))
            good = ric_k_scan(P, 5, samples)
            bad = ric_k_scan(P, 4, samples)
            this = worst <= 1e-12 and good.verdict and not bad.verdict and abs(bad.min_margin) <= 1e-12 * scale
            ok &= this
            parts.append(f"rho={rho:g}: rel diff {worst:.1e}, k=5 {good.verdict}, k=4 {bad.verdict} "
                         f"margin {bad.min_margin:.1e}")
    ok = ok and clock.elapsed < 30
    acceptance(5, ok, f"{'; '.join(parts)}, {clock.elapsed:.2f} s (limit 30 s)")
    assert ok


def test_criterion_6_dwp_identity(acceptance):
    parts, ok = [], True
    with Clock() as clock:
        for p, q, k in ((2, 2, 4), (3, 4, 7)):
            rep = verify_on_grid(WarpPair(Sine(), Cosine(), p, q, (0.0, np.pi / 2)), k, 1000)
            err = float(np.max(np.abs(rep.lhs - k)))
            ok &= err <= 1e-12 and rep.lhs.shape == (4, 1000)
            parts.append(f"({p},{q},{k}) max |lhs - k| = {err:.1e}")
    ok = ok and clock.elapsed < 1
    acceptance(6, ok, f"{'; '.join(parts)} (tol 1e-12), {clock.elapsed:.3f} s (limit 1 s)")
    assert ok


def test_criterion_7_pipeline(acceptance):
    with Clock() as clock:
        state, rep = run_pipeline(3, 3, 5, 0.9, 0.01)
        grid = pipeline_grid(state, 10000)
        rep = final_report(state, grid)
        props = check_S_properties(state, n_halvings=5, grid=grid)
        lemmas = check_support_lemmas(state, n_pairs=0)
    r = props.results
    ratios = props.details["S9"]["h(a)/f(a)"]
    s9 = r["S9"] and ratios[-1] < 0.5 * ratios[0]
    checks = {
        "verify (1)-(4) strict": rep.verdict,
        "S1": r["S1"], "S4": r["S4"], "S5": r["S5"], "S6": r["S6"], "S7": r["S7"], "S8": r["S8"],
        "S9": s9,
        "star": lemmas.results["star"],
        "phi chain": lemmas.results["phi_chain"] and lemmas.results["phi_half_bounds"],
    }
    ok = all(checks.values()) and grid.size >= 10000 and clock.elapsed < 60
    failed = [k for k, v in checks.items() if not v]
    acceptance(7, ok, f"grid {grid.size} points, relative minima "
                      f"{tuple(round(m, 3) for m in rep.relative_minima)}, "
                      f"h(a)/f(a) {ratios[0]:.2e} -> {ratios[-1]:.2e}, failed {failed or 'none'}, "
                      f"{clock.elapsed:.2f} s (limit 60 s)")
    assert ok


def test_criterion_8_support_lemmas(acceptance):
    state, _ = run_pipeline(3, 3, 5, 0.9, 0.01)
    with Clock() as clock:
        rep = check_support_lemmas(state, n_pairs=200, seed=0)
    r = rep.results
    ok = r["f_comparison_random"] and r["f_comparison_pipeline"] and r["hprime_f_decreasing"] and clock.elapsed < 10
    cex = rep.details["f_comparison_random"]["counterexamples"]
    acceptance(8, ok, f"200 random pairs, {cex} counterexamples; (f, L) pair {r['f_comparison_pipeline']}; "
                      f"h'f decreasing {r['hprime_f_decreasing']}, {clock.elapsed:.2f} s (limit 10 s)")
    assert ok


def test_flat_linear_pair_is_not_a_witness():
    # sanity check that the criteria can fail: h = t, f = 1 has zero margins
    rep = verify_on_grid(WarpPair(Linear(0.0, 1.0), Linear(1.0, 0.0), 2, 2, (0.0, 1.0)), 4, 100)
    assert not rep.verdict
