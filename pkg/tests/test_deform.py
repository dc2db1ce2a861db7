"""Warping-function pipeline: stages, state invariants and property audits."""
from dataclasses import replace

import numpy as np
import pytest

from ricverify.deform import (
    DEFAULTS,
    DeformationState,
    bend_h,
    build_phi,
    build_state,
    c1_smooth,
    check_S_properties,
    check_support_lemmas,
    concave_bend_f,
    default_f,
    default_h,
    f_comparison_holds,
    final_report,
    find_t2,
    lambda_t2,
    linear_extension,
    pipeline_grid,
    psi,
    psi_prime,
    random_comparison_pairs,
    run_pipeline,
    s8_sup_check,
)
from ricverify.dwp import WarpPair, verify_on_grid
from ricverify.errors import (
    BadLambda,
    BadParams,
    BendTooLarge,
    DegenerateSlope,
    GuardViolated,
    NoBracket,
    PipelineFailed,
    SlopeMismatch,
    WrongStage,
)
from ricverify.functions import Constant, CoshProfile, ExpSaturation, Linear, Piecewise, finite_difference

ARGS = (3, 3, 5, 0.9, 0.01)


@pytest.fixture(scope="module")
def final():
    return run_pipeline(*ARGS)


@pytest.fixture(scope="module")
def extended():
    return build_state(*ARGS, until="extended")


# -- families ------------------------------------------------------------


def test_default_families_on_the_cap():
    h = default_h()
    assert h(0.1) == np.sin(0.1)
    assert h(0.1) == pytest.approx(0.0998334, abs=1e-7)
    f = default_f({"rho_prime": 0.05, "k": 5, "q": 3})
    assert f(0.1) == 0.05
    t = np.linspace(0.0, DEFAULTS["r_prime"], 50)
    assert np.all(f(t) == 0.05)


def test_default_f_requires_parameters():
    with pytest.raises(BadParams):
        default_f({"rho_prime": 0.05, "k": 5})
    with pytest.raises(BadParams):
        default_f({"rho_prime": 0.0, "k": 5, "q": 3})
    with pytest.raises(BadParams):
        default_h({"r_prime": 0.3})
    with pytest.raises(BadParams):
        default_h({"colour": 1})


# -- t2 --------------------------------------------------------------------


def test_find_t2_cosh():
    f = CoshProfile(0.05, 1.0)
    t2 = find_t2(f, 0.9)
    assert t2 == pytest.approx(np.arcsinh(18.0), rel=1e-14)
    assert t2 == pytest.approx(3.5843, abs=1e-4)
    assert abs(f(t2, 1) - 0.9) <= 1e-12


def test_find_t2_no_bracket():
    with pytest.raises(NoBracket):
        find_t2(CoshProfile(0.05, 1.0), 0.9, 0.0, 1.0)
    with pytest.raises(NoBracket):
        find_t2(Linear(0.0, 0.5), 0.9)


@pytest.mark.parametrize("family", ["cosh", "default"])
def test_t2_increases_as_rho_decreases(family):
    rhos = (0.1, 0.05, 0.025, 0.0125)
    if family == "cosh":
        fs = [CoshProfile(r, 1.0) for r in rhos]
    else:
        fs = [default_f({"rho_prime": r, "k": 5, "q": 3}) for r in rhos]
    t2s = [find_t2(f, 0.9) for f in fs]
    assert all(b > a for a, b in zip(t2s, t2s[1:]))


# -- linear extension and smoothing ------------------------------------------


def test_linear_extension_is_c1(extended):
    st = extended
    fb, f, t2 = st.f, st.f_base, st.t2
    assert fb(t2 + 1.0) == pytest.approx(f(t2) + 0.9, rel=1e-15)
    lo, hi = np.nextafter(t2, 0), np.nextafter(t2, np.inf)
    assert abs(fb(hi) - fb(lo)) <= 1e-10 * fb(t2)
    assert abs(fb(hi, 1) - fb(lo, 1)) <= 1e-10
    assert fb(lo, 2) > 0 and fb(hi, 2) == 0.0
    t = np.geomspace(0.1, 3 * t2, 2000)
    assert np.all(np.diff(fb(t, 1)) >= 0)


def test_linear_extension_second_derivative_vanishes():
    f = CoshProfile(0.05, 1.0)
    t2 = find_t2(f, 0.9)
    fb = linear_extension(f, t2, 0.9)
    assert np.all(fb(np.linspace(t2 + 1e-9, t2 + 5, 30), 2) == 0.0)
    with pytest.raises(SlopeMismatch):
        linear_extension(f, t2 * 1.01, 0.9)


def test_smoothing_of_smooth_input_is_identity():
    f = CoshProfile(0.05, 1.0)
    assert c1_smooth(f, 1.0, 0.01) is f
    pw = Piecewise(f, Linear(1.0, 0.9, 2.0), 2.0)
    assert c1_smooth(pw, 1.0, 0.01) is pw


def test_smoothing_window(final):
    st, _ = final
    fs, fb, t2, eps = st.f_smooth, st.f_base, st.t2, st.eps
    outside = np.r_[np.linspace(t2 - 10 * eps, t2 - eps * 1.0001, 20), np.linspace(t2 + eps * 1.0001, t2 + 10 * eps, 20)]
    line = Linear(float(fb(t2)), 0.9, t2)
    ref = np.where(outside < t2, fb(outside), line(outside))
    np.testing.assert_array_equal(fs(outside), ref)
    win = np.linspace(t2 - eps, t2 + eps, 4001)
    f2 = fs(win, 2)
    c = float(fb(t2, 2))
    assert np.all(f2 >= 0)
    # the bridge overshoots the left limit slightly (see c1_smooth)
    assert np.max(f2) <= 1.1 * c
    # value and slope continuity at both ends
    for end, other in ((t2 - eps, fb), (t2 + eps, line)):
        assert fs(end) == pytest.approx(other(end), rel=1e-12)
        assert fs(end, 1) == pytest.approx(other(end, 1), rel=1e-9)
    # third derivative consistent with the second
    inner = win[50:-50:100]
    d3 = finite_difference(lambda x: fs(x, 2), inner, 1, step=eps * 1e-4)
    np.testing.assert_allclose(fs(inner, 3), d3, rtol=1e-5, atol=1e-7 * np.max(np.abs(d3)))


def test_smoothing_window_inequalities(final):
    st, _ = final
    w = WarpPair(st.h_base, st.f_smooth, st.p, st.q, (0.0, np.inf))
    rep = verify_on_grid(w, st.k, grid=np.linspace(st.t2 - st.eps, st.t2 + st.eps, 1001))
    assert min(rep.relative_minima) >= -1e-9


def test_smoothing_guard(extended):
    st = extended
    with pytest.raises(GuardViolated):
        c1_smooth(st.f, st.t2, 1e-3 * st.t2, guard=lambda *a: False)


# -- lambda, phi, bends ---------------------------------------------------------


def test_lambda_examples():
    lam = lambda_t2(ExpSaturation(2.0, 1.0, 1.0), 1.0)
    e = np.exp(-1.0)
    assert lam == pytest.approx(-1 - e / (2 - e), rel=1e-14)
    assert lam == pytest.approx(-1.2254, abs=1e-4)
    assert lambda_t2(Linear(0.0, 1.0), 2.5) == pytest.approx(-1 / 2.5)
    with pytest.raises(DegenerateSlope):
        lambda_t2(Constant(1.0), 1.0)


def test_lambda_negative_for_concave_increasing():
    h = default_h()
    for t in np.geomspace(0.1, 1e6, 30):
        assert lambda_t2(h, t) < 0


def test_build_phi():
    h = ExpSaturation(2.0, 1.0, 1.0)
    phi, t3 = build_phi(h, 1.0)
    lam = lambda_t2(h, 1.0)
    assert t3 == pytest.approx(1 - 1 / lam, rel=1e-15)
    assert psi_prime(1.0, 1.0, lam) == 1.0
    assert psi_prime(t3, 1.0, lam) == pytest.approx(0.0, abs=1e-15)
    assert psi_prime(0.5 * (1.0 + t3), 1.0, lam) == pytest.approx(0.5)
    t = np.linspace(0.0, 3.0, 10000)
    d2 = phi(t, 2)
    assert np.all((d2 >= lam - 1e-9) & (d2 <= 1e-12))
    d1 = phi(t, 1)
    assert np.all((d1 >= 0) & (d1 <= 1))
    near = np.linspace(1.0 - phi.delta, 1.0 + phi.delta, 500)
    assert np.all(phi(near, 1) <= psi_prime(near, 1.0, lam) + 1e-15)
    # C^1 distance to psi is of the order of the smoothing width
    assert np.max(np.abs(phi(t) - psi(t, 1.0, lam))) <= phi.delta
    assert np.max(np.abs(d1 - psi_prime(t, 1.0, lam))) <= abs(lam) * phi.delta
    with pytest.raises(BadLambda):
        build_phi(CoshProfile(1.0, 1.0), 1.0)


def test_bend_h():
    h = ExpSaturation(2.0, 1.0, 1.0)
    phi, t3 = build_phi(h, 1.0)
    ht = bend_h(h, phi)
    before = np.linspace(0.0, phi.start, 100)
    np.testing.assert_array_equal(ht(before), h(before))
    after = np.linspace(t3 + phi.delta, t3 + 3, 100)
    np.testing.assert_array_equal(ht(after), h(phi(t3 + phi.delta)))
    assert np.all(ht(after, 1) == 0.0)
    t = np.linspace(0.0, t3 + 1, 5000)
    assert np.all(ht(t, 1) >= 0) and np.all(ht(t, 2) <= 1e-10)


def test_concave_bend_f():
    f = Linear(1.0, 0.9, 0.0)
    assert concave_bend_f(f, 3.0, 0.1, 0.0) is f
    g = concave_bend_f(f, 3.0, 0.1, 0.5)
    t = np.linspace(0.0, 2.9, 100)
    np.testing.assert_array_equal(g(t), f(t))
    assert np.all(g(np.linspace(2.91, 3.2, 50), 2) < 0)
    assert np.all(g(np.linspace(0, 3.2, 500), 1) >= 0)
    with pytest.raises(BendTooLarge):
        concave_bend_f(f, 3.0, 0.1, 50.0)


# -- state -----------------------------------------------------------------------


def test_state_invariants(final):
    st, _ = final
    assert st.stage == "final"
    assert st.t0 < st.t2 < st.t3 < st.a and st.lambda_t2 < 0
    assert abs(st.t3 - (st.t2 - 1 / st.lambda_t2)) <= 1e-12 * st.t3
    with pytest.raises(BadParams):
        replace(st, t3=st.t3 * 1.01)
    with pytest.raises(BadParams):
        replace(st, delta=1.0)
    with pytest.raises(BadParams):
        replace(st, r_prime=0.25)
    with pytest.raises(BadParams):
        replace(st, stage="done")
    with pytest.raises(BadParams):
        DeformationState(3, 3, 5, 0.9, -0.1, st.h, st.f)


def test_build_state_parameter_checks():
    with pytest.raises(BadParams):
        build_state(1, 3, 5, 0.9, 0.01)
    with pytest.raises(BadParams):
        build_state(3, 3, 3, 0.9, 0.01)
    with pytest.raises(BadParams):
        build_state(3, 3, 5, 0.9, 0.01, {"wiggle": 1})


def test_wrong_stage(extended):
    with pytest.raises(WrongStage):
        check_S_properties(extended)
    with pytest.raises(WrongStage):
        check_support_lemmas(build_state(*ARGS, until="base"))


# -- pipeline ---------------------------------------------------------------------


def test_pipeline_default(final):
    st, rep = final
    assert rep.verdict
    assert all(m > 0 for m in rep.minima)
    assert rep.grid.size >= 9000 and rep.grid[-1] == st.a
    assert final_report(st, pipeline_grid(st, 2000)).verdict


def test_pipeline_boundary_case():
    _, rep = run_pipeline(2, 4, 6, 0.9, 0.01)
    assert rep.verdict


@pytest.mark.parametrize("args, stage", [((3, 3, 4, 0.9, 0.01), "smoothed"), ((2, 4, 5, 0.9, 0.01), "base")])
def test_k_below_threshold_fails_at_a_stage(args, stage):
    with pytest.raises(PipelineFailed) as info:
        run_pipeline(*args)
    assert info.value.stage == stage


def test_s_properties(final):
    st, _ = final
    rep = check_S_properties(st)
    for name in ("S1", "S2", "S4", "S5", "S6", "S7", "S8", "S9"):
        assert rep.results[name], name
    assert rep.passed
    # S3 fails after the bend and is only reported
    assert rep.results["S3"] is False
    ratios = rep.details["S9"]["h(a)/f(a)"]
    assert len(ratios) == 6 and ratios[-1] < ratios[0]
    assert rep.details["S2"]["min_f2_on_window"] < 0


def test_s8_fails_for_small_t2(final):
    h = default_h()
    holds, low, high = s8_sup_check(h, 0.6)
    assert not holds and high > low
    st, _ = final
    assert s8_sup_check(st.h_base, st.t2)[0]


def test_support_lemmas(final):
    st, _ = final
    rep = check_support_lemmas(st, n_pairs=20)
    assert rep.passed, rep.details
    assert rep.details["phi_chain"]["bound"] < rep.details["phi_chain"]["|h''(1/2)|"]


def test_f_comparison_pieces():
    f = CoshProfile(0.05, 1.0)
    t2 = find_t2(f, 0.9)
    L = Linear(float(f(t2)), 0.9, t2)
    assert f_comparison_holds(f, L, np.linspace(t2 + 1e-3, t2 + 5, 200))[0]
    # reversing the pair reverses the conclusion
    assert not f_comparison_holds(L, f, np.linspace(t2 + 1e-3, t2 + 5, 200))[0]
    pairs = random_comparison_pairs(10, seed=3)
    assert all(ok for ok, _ in pairs)


def test_smooth_dependence_on_rho():
    base = build_state(*ARGS)
    near = build_state(3, 3, 5, 0.9, 0.01 * (1 + 1e-5))
    far = build_state(3, 3, 5, 0.9, 0.01 * (1 + 2e-5))
    d1, d2 = near.a / base.a - 1, far.a / base.a - 1
    assert 0 < abs(d1) <= 1e-3
    # changes scale linearly with the step
    assert d2 / d1 == pytest.approx(2.0, rel=1e-2)
    t = np.linspace(0.3, 0.5 * base.t2, 50)
    np.testing.assert_allclose(near.f(t), base.f(t), rtol=1e-3)
    np.testing.assert_allclose(near.h(t), base.h(t), rtol=1e-3)
