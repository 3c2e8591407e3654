import math

import numpy as np
import pytest

from voxcompress import make_projection, project


def test_p1_is_dense_signs():
    # s = sqrt(1) = 1: every entry is +-1/sqrt(k)
    proj = make_projection(1, 8, seed=0)
    dense = proj.matrix.toarray().ravel()
    assert proj.n_nonzeros == 8
    assert np.allclose(np.abs(dense), 1.0 / math.sqrt(8))


def test_seed_determinism():
    a = make_projection(500, 20, seed=9)
    b = make_projection(500, 20, seed=9)
    c = make_projection(500, 20, seed=10)
    assert (a.matrix != b.matrix).nnz == 0
    assert a.matrix.data.tobytes() == b.matrix.data.tobytes()
    assert (a.matrix != c.matrix).nnz > 0


def test_expected_nonzeros_per_row():
    # p=10^4, k=100: expected nonzeros per row = p/sqrt(p) = 100, i.e. one
    # nonzero per row-column-budget k/sqrt(p) = 1 per output coordinate
    p, k = 10_000, 100
    proj = make_projection(p, k, seed=3)
    total = proj.n_nonzeros
    expected = k * p / math.sqrt(p)
    sigma = math.sqrt(k * p * (1 / math.sqrt(p)) * (1 - 1 / math.sqrt(p)))
    assert abs(total - expected) <= 3 * sigma


def test_value_scale():
    p, k = 400, 16
    proj = make_projection(p, k, seed=1)
    expected = math.sqrt(math.sqrt(p)) / math.sqrt(k)
    assert np.allclose(np.abs(proj.matrix.data), expected)


def test_project_zero():
    proj = make_projection(50, 10, seed=0)
    assert np.allclose(project(proj, np.zeros(50)), 0.0)


def test_project_linearity():
    rng = np.random.default_rng(2)
    proj = make_projection(200, 30, seed=5)
    x, y = rng.standard_normal((2, 200))
    lhs = project(proj, 2.5 * x - 1.25 * y)
    rhs = 2.5 * project(proj, x) - 1.25 * project(proj, y)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_project_dimension_mismatch():
    proj = make_projection(10, 4, seed=0)
    with pytest.raises(ValueError):
        project(proj, np.zeros(11))


def test_norm_unbiased_over_seeds():
    # E[|f(x)|^2] = |x|^2: mean over many seeds within 5%
    rng = np.random.default_rng(7)
    p, k = 256, 16
    x = rng.standard_normal(p)
    ratios = []
    for seed in range(1000):
        proj = make_projection(p, k, seed=seed)
        fx = project(proj, x)
        ratios.append((fx @ fx) / (x @ x))
    assert abs(np.mean(ratios) - 1.0) < 0.05


def test_concentration_improves_with_k():
    # std of eta shrinks as k grows (JL trend)
    rng = np.random.default_rng(8)
    p = 2000
    x1, x2 = rng.standard_normal((2, p))
    diff = x1 - x2
    denom = diff @ diff
    stds = []
    for k in (16, 256):
        etas = []
        for seed in range(300):
            proj = make_projection(p, k, seed=seed)
            fd = project(proj, diff)
            etas.append((fd @ fd) / denom)
        stds.append(np.std(etas))
    assert stds[1] < stds[0]


def test_distance_preservation_at_compliant_k():
    # for n=50 points and any k >= 8 ln(n)/eps^2 with eps=0.5, the max pair
    # distortion stays within eps in at least 90% of trials; checked at a
    # k comfortably above the bound (the bound itself is an existence
    # statement, not a sup guarantee at the minimal k)
    n, eps = 50, 0.5
    k_min = math.ceil(8 * math.log(n) / eps**2)
    k = 2 * k_min
    p = 2000
    rng = np.random.default_rng(9)
    ok = 0
    trials = 30
    iu = np.triu_indices(n, 1)
    for seed in range(trials):
        X = rng.standard_normal((n, p))
        proj = make_projection(p, k, seed=seed)
        Y = project(proj, X.T).T
        d0 = ((X[iu[0]] - X[iu[1]]) ** 2).sum(axis=1)
        d1 = ((Y[iu[0]] - Y[iu[1]]) ** 2).sum(axis=1)
        ok += np.abs(d1 / d0 - 1).max() <= eps
    assert ok >= 0.9 * trials
