"""Curvature tensors: symmetries, sectional curvature, R_X and Ric_k scans."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ricverify import _backend
from ricverify.errors import BadK, NotOrthonormal, NotUnit
from ricverify.oracle import berger, constant_curvature_tensor, curvature_from_connection, product_tensor, sphere_tensor
from ricverify.spectral import sorted_eigenvalues
from ricverify.submersion import project_curvature
from ricverify.tensor import (
    CurvatureTensor,
    directional_operator,
    frame_and_random_sample,
    from_plane_curvatures,
    ric_k,
    ric_k_scan,
    sectional,
    validate_symmetries,
)


def random_tensor(n, seed):
    return CurvatureTensor(project_curvature(np.random.default_rng(seed).standard_normal((n,) * 4)))


def unit(rng, n):
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def test_round_sphere_has_no_violations():
    rep = validate_symmetries(sphere_tensor(4) * 2.5)
    assert rep.passed and rep.max_violation == 0.0


def test_perturbed_entry_is_reported():
    c = np.array(sphere_tensor(3).comp)
    c[0, 1, 0, 1] += 1e-3
    rep = validate_symmetries(c)
    assert rep.violations["antisym_ab"] == pytest.approx(1e-3)
    assert not rep.passed


def test_berger_tensor_symmetries():
    for t in (0.1, 0.5, 1.3):
        assert validate_symmetries(curvature_from_connection(berger(t)), tol=1e-12).passed


def test_random_projected_tensor_symmetries():
    assert validate_symmetries(random_tensor(5, 0), tol=1e-12).passed


def test_sectional_examples():
    R = sphere_tensor(5)
    rng = np.random.default_rng(0)
    v = unit(rng, 5)
    w = unit(rng, 5)
    w = w - (w @ v) * v
    w /= np.linalg.norm(w)
    assert sectional(R, v, w) == pytest.approx(1.0)
    P = product_tensor(sphere_tensor(3, 0.5), sphere_tensor(4))
    assert sectional(P, np.eye(7)[0], np.eye(7)[5]) == 0.0
    assert sectional(P, np.eye(7)[0], np.eye(7)[1]) == pytest.approx(4.0)
    with pytest.raises(NotOrthonormal):
        sectional(R, np.eye(5)[0], np.eye(5)[0])


@pytest.mark.parametrize("t", [0.25, 0.5, 1.0])
def test_berger_horizontal_sectional(t):
    # frame index 0 is the Hopf direction
    R = curvature_from_connection(berger(t))
    assert sectional(R, np.eye(3)[1], np.eye(3)[2]) == pytest.approx(4 - 3 * t, abs=1e-12)
    ev = sorted_eigenvalues(directional_operator(R, np.eye(3)[1]).entries)
    np.testing.assert_allclose(ev, sorted([0.0, t, 4 - 3 * t]), atol=1e-12)


def test_directional_operator_round_sphere():
    M = directional_operator(sphere_tensor(3), np.eye(3)[0]).entries
    np.testing.assert_allclose(M, np.diag([0.0, 1.0, 1.0]), atol=1e-15)
    with pytest.raises(NotUnit):
        directional_operator(sphere_tensor(3), np.array([1.0, 1.0, 0.0]))


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 7), st.integers(0, 10_000))
def test_x_is_null_and_operator_symmetric(n, seed):
    R = random_tensor(n, seed)
    X = unit(np.random.default_rng(seed + 1), n)
    M = directional_operator(R, X).entries
    assert abs(X @ M @ X) < 1e-10
    assert np.max(np.abs(M @ X)) < 1e-10
    raw = _backend.directional_batch(R.comp, X[None])[0]
    assert np.max(np.abs(raw - raw.T)) < 1e-12


def test_quadratic_form_is_sectional():
    R = random_tensor(5, 3)
    X, Y = np.eye(5)[0], np.eye(5)[3]
    M = directional_operator(R, X).entries
    assert Y @ M @ Y == pytest.approx(sectional(R, X, Y))


def test_ric_k_sums_sectionals():
    R = sphere_tensor(4)
    assert ric_k(R, np.eye(4)[:3]) == pytest.approx(2.0)


def test_sample_vectors_are_unit():
    s = frame_and_random_sample(6, n_rand=50, seed=2)
    assert np.max(np.abs(np.linalg.norm(s.vectors, axis=1) - 1)) <= 1e-12
    assert s.count == 6 + 15 * 3 + 50


def test_scan_examples():
    assert ric_k_scan(sphere_tensor(7), 1, frame_and_random_sample(7, 64)).verdict
    assert ric_k_scan(sphere_tensor(7), 1, frame_and_random_sample(7, 64)).min_margin == pytest.approx(1.0)
    P = product_tensor(sphere_tensor(3), sphere_tensor(4))
    samples = frame_and_random_sample(7, 256)
    assert ric_k_scan(P, 5, samples).verdict
    bad = ric_k_scan(P, 4, samples)
    assert not bad.verdict and bad.min_margin == pytest.approx(0.0, abs=1e-12)
    # X tangent to S^3 has five null directions (itself and the S^4 factor)
    assert np.linalg.norm(bad.worst_direction[:3]) == pytest.approx(1.0)
    flat = constant_curvature_tensor(4, 0.0)
    for k in (1, 2, 3):
        assert not ric_k_scan(flat, k, frame_and_random_sample(4, 8)).verdict
    with pytest.raises(BadK):
        ric_k_scan(flat, 4, frame_and_random_sample(4, 8))


def test_scan_monotone_in_k():
    R = random_tensor(6, 9) + sphere_tensor(6) * 3.0
    s = frame_and_random_sample(6, 100)
    verdicts = [ric_k_scan(R, k, s).verdict for k in range(1, 6)]
    for a, b in zip(verdicts, verdicts[1:]):
        assert b or not a


@pytest.mark.parametrize("p, q", [(3, 4), (2, 2), (3, 3)])
def test_products_match_factorwise_threshold(p, q):
    # Ric_1 > 0 on each round factor, so the threshold is max(1 + q, 1 + p)
    P = product_tensor(sphere_tensor(p, 0.5), sphere_tensor(q))
    s = frame_and_random_sample(p + q, 512, seed=p * 10 + q)
    threshold = max(1 + q, 1 + p)
    for k in range(1, p + q):
        assert ric_k_scan(P, k, s).verdict == (k >= threshold)


def test_from_plane_curvatures_roundtrip():
    rng = np.random.default_rng(1)
    K = rng.uniform(-1, 2, (5, 5))
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, 0.0)
    R = from_plane_curvatures(K)
    assert validate_symmetries(R, 1e-12).passed
    for i in range(5):
        for j in range(5):
            if i != j:
                assert sectional(R, np.eye(5)[i], np.eye(5)[j]) == pytest.approx(K[i, j])


@pytest.mark.skipif(_backend.compiled_kernels is None, reason="compiled kernels not built")
def test_directional_batch_backends_agree():
    R = random_tensor(7, 4)
    X = np.random.default_rng(5).standard_normal((30, 7))
    np.testing.assert_allclose(
        _backend.compiled_kernels.directional_batch(R.comp, X),
        _backend.python_kernels.directional_batch(R.comp, X),
        atol=1e-12,
    )
