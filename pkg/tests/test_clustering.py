import math

import numpy as np
import pytest

from daspec import (
    DaSpecParams,
    DataSet,
    DegenerateDataError,
    InputError,
    KernelSpec,
    chi_square_quantile,
    classify,
    cluster,
    gen_gaussian_mixture,
    Gaussian,
    MixtureSpec,
    has_no_sign_change,
    select_bandwidth,
    select_epsilon,
)
from daspec.clustering import _scan_eigenvectors
from daspec.linalg import EigenSystem

CHI2_1_95 = 3.8414588206941245  # 95% quantile, 1 dof, by scipy-independent tables
CHI2_2_95 = 5.991464547107982


def brute_force_bandwidth(points):
    """Independent nearest-rank oracle over explicitly built distance lists."""
    n = len(points)
    q = []
    for i in range(n):
        dists = sorted(
            math.dist(points[i], points[j]) for j in range(n) if j != i
        )
        q.append(dists[math.ceil(round(0.05 * (n - 1), 9)) - 1])
    q.sort()
    numer = q[math.ceil(round(0.95 * n, 9)) - 1]
    d = len(points[0])
    return numer / math.sqrt(chi_square_quantile(0.95, d))


def test_chi_square_quantiles():
    assert chi_square_quantile(0.95, 1) == pytest.approx(CHI2_1_95, abs=1e-8)
    assert chi_square_quantile(0.95, 2) == pytest.approx(CHI2_2_95, abs=1e-8)
    with pytest.raises(InputError):
        chi_square_quantile(1.5, 2)
    with pytest.raises(InputError):
        chi_square_quantile(0.5, 0)


def test_bandwidth_two_points():
    data = DataSet([[0.0], [1.0]])
    assert select_bandwidth(data) == pytest.approx(1.0 / math.sqrt(CHI2_1_95), abs=1e-8)
    assert select_bandwidth(data) == pytest.approx(0.51023, abs=2e-5)


def test_bandwidth_three_collinear():
    s = 0.7
    data = DataSet([[0.0], [s], [2 * s]])
    assert select_bandwidth(data) == pytest.approx(s / math.sqrt(CHI2_1_95), rel=1e-12)


def test_bandwidth_matches_brute_force_oracle_on_mixture_sample():
    mixture = MixtureSpec(tuple(
        (1.0 / 6.0, Gaussian(mean=(mx, my), sigma=0.5))
        for mx, my in [(-3, -3), (-3, 3), (0, 0), (3, -3), (3, 3), (4, 0)]
    ))
    data = gen_gaussian_mixture(mixture, 400, seed=12)
    got = select_bandwidth(data)
    assert got == pytest.approx(brute_force_bandwidth(data.points.tolist()), rel=1e-12)
    assert got > 0.0 and math.isfinite(got)
    # Same seed, same value.
    again = select_bandwidth(gen_gaussian_mixture(mixture, 400, seed=12))
    assert again == got


def test_bandwidth_errors():
    with pytest.raises(InputError):
        select_bandwidth(DataSet([[0.0]]))
    with pytest.raises(DegenerateDataError):
        select_bandwidth(DataSet([[1.0, 2.0]] * 25))


def test_epsilon_examples():
    assert select_epsilon(np.array([1.0, 0.0, 0.0, 0.0]), 4) == 0.25
    assert select_epsilon(np.array([0.6, -0.8]), 2) == pytest.approx(0.4)
    with pytest.raises(InputError):
        select_epsilon(np.zeros(3), 3)


def test_epsilon_matches_direct_scan():
    rng = np.random.default_rng(8)
    v = rng.normal(size=100)
    v /= np.linalg.norm(v)
    assert select_epsilon(v, 100) == max(abs(x) for x in v) / 100


def test_no_sign_change_rule():
    assert has_no_sign_change(np.array([0.9, 0.3, 0.1]), 0.01)
    assert not has_no_sign_change(np.array([0.9, -0.3, 0.1]), 0.01)
    # A dip above -eps does not count as a sign change.
    assert has_no_sign_change(np.array([0.9, -0.005, 0.1]), 0.01)
    assert has_no_sign_change(np.array([-0.9, -0.3, 0.005]), 0.01)
    with pytest.raises(InputError):
        has_no_sign_change(np.array([1.0]), 0.0)


def test_cluster_all_points_identical():
    data = DataSet([[2.0, 2.0]] * 12)
    result = cluster(data, DaSpecParams(bandwidth=1.0))
    assert result.g_hat == 1
    assert np.all(result.labels == 1)


def test_cluster_single_point():
    result = cluster(DataSet([[5.0]]))
    assert result.g_hat == 1
    assert result.labels.tolist() == [1]


def test_cluster_two_far_groups_exact():
    rng = np.random.default_rng(10)
    omega = 0.25
    left = rng.normal(0.0, omega, (50, 2))
    right = rng.normal(0.0, omega, (50, 2)) + 20.0 * omega * 4
    data = DataSet(np.vstack([left, right]))
    # Cross-group kernel entries are below exp(-200): numerically invisible.
    gap = 20.0 * omega * 4 - np.abs(np.vstack([left, right - 20.0 * omega * 4])).max() * 2
    assert math.exp(-(gap**2) / (2 * omega**2)) <= math.exp(-200.0)
    result = cluster(data, DaSpecParams(bandwidth=omega))
    assert result.g_hat == 2
    truth = np.array([1] * 50 + [2] * 50)
    flipped = 3 - truth
    assert np.array_equal(result.labels, truth) or np.array_equal(result.labels, flipped)


def test_cluster_bimodal_line_matches_sign_partition():
    rng = np.random.default_rng(0)
    comp = rng.integers(0, 2, 1000)
    x = np.where(comp == 0, rng.normal(2.0, 1.0, 1000), rng.normal(-2.0, 1.0, 1000))
    result = cluster(DataSet(x), DaSpecParams(bandwidth=0.3))
    assert result.g_hat == 2
    truth = np.where(x < 0, 1, 2)
    agree = max(
        np.mean(result.labels == truth),
        np.mean(result.labels == (3 - truth)),
    )
    assert agree >= 0.9


def test_top_eigenvector_always_selected():
    # The kernel matrix is entrywise positive, so its top eigenvector is
    # single-signed (Perron); the first eigenvector always passes the scan
    # and g_hat >= 1.
    for seed in range(8):
        rng = np.random.default_rng(seed)
        data = DataSet(rng.normal(size=(40, 2)) * rng.uniform(0.2, 3.0))
        result = cluster(data)
        assert result.g_hat >= 1
        assert result.selected_indices[0] == 0
        assert np.all(np.diff(result.selected_indices) > 0)
        assert np.all((result.labels >= 1) & (result.labels <= result.g_hat))


def test_permutation_equivariance():
    rng = np.random.default_rng(13)
    points = rng.normal(size=(60, 2))
    points[30:] += 8.0
    data = DataSet(points)
    params = DaSpecParams(bandwidth=0.5)
    base = cluster(data, params)
    perm = rng.permutation(60)
    permuted = cluster(DataSet(points[perm]), params)
    assert permuted.g_hat == base.g_hat
    assert np.array_equal(permuted.labels, base.labels[perm])


def test_labels_invariant_under_eigenvector_sign_flip():
    rng = np.random.default_rng(14)
    points = np.vstack([rng.normal(size=(30, 1)), rng.normal(size=(30, 1)) + 9.0])
    result = cluster(DataSet(points), DaSpecParams(bandwidth=0.4))
    flips = np.where(rng.integers(0, 2, result.g_hat) == 0, -1.0, 1.0)
    relabeled = np.argmax(np.abs(result.selected_vectors * flips), axis=1) + 1
    assert np.array_equal(relabeled, result.labels)


def test_cluster_identical_points_auto_bandwidth_degenerate():
    # Auto bandwidth propagates the degenerate-data error: the neighbor
    # quantile is zero when every point coincides.
    with pytest.raises(DegenerateDataError):
        cluster(DataSet([[2.0, 2.0]] * 12))


def test_cluster_fixed_epsilon():
    rng = np.random.default_rng(23)
    points = np.vstack([rng.normal(0, 0.3, (30, 1)), rng.normal(9, 0.3, (30, 1))])
    data = DataSet(points)
    auto = cluster(data, DaSpecParams(bandwidth=0.3))
    fixed = cluster(data, DaSpecParams(bandwidth=0.3, epsilon=1e-6))
    # The two separated bumps survive any reasonable precision.
    assert fixed.g_hat == auto.g_hat == 2
    assert np.all(fixed.selected_epsilons == 1e-6)
    # A huge precision declares every eigenvector sign-free.
    sloppy = cluster(data, DaSpecParams(bandwidth=0.3, epsilon=10.0))
    assert sloppy.g_hat >= fixed.g_hat


def test_scan_raises_when_nothing_selected():
    # A synthetic spectrum that is entirely below the floor must raise: the
    # algorithm never returns zero groups silently.
    eig = EigenSystem(values=np.array([5e-11, 1e-12]), vectors=np.eye(2))
    with pytest.raises(DegenerateDataError):
        _scan_eigenvectors(eig, 2, DaSpecParams(bandwidth=1.0))


def test_params_validation():
    with pytest.raises(InputError):
        DaSpecParams(bandwidth=-0.1)
    with pytest.raises(InputError):
        DaSpecParams(epsilon=0.0)
    with pytest.raises(InputError):
        DaSpecParams(eigenvalue_floor=0.0)


def test_classify_training_points_reproduce_labels():
    rng = np.random.default_rng(17)
    points = np.vstack([rng.normal(size=(25, 2)), rng.normal(size=(25, 2)) + 10.0])
    data = DataSet(points)
    params = DaSpecParams(bandwidth=0.6)
    result = cluster(data, params)
    spec = KernelSpec("gaussian", result.params_used.bandwidth)
    predicted = classify(result, data, spec, data.points)
    assert np.array_equal(predicted, result.labels)


def test_classify_far_cluster_center():
    rng = np.random.default_rng(18)
    omega = 0.25
    centers = np.array([[0.0, 0.0], [30.0, 0.0]])
    points = np.vstack([rng.normal(0, omega, (40, 2)) + c for c in centers])
    data = DataSet(points)
    result = cluster(data, DaSpecParams(bandwidth=omega))
    assert result.g_hat == 2
    spec = KernelSpec("gaussian", omega)
    for c in centers:
        want = result.labels[np.argmin(np.linalg.norm(points - c, axis=1))]
        assert classify(result, data, spec, c) == want


def test_classify_bimodal_by_majority_vote_oracle():
    rng = np.random.default_rng(19)
    comp = rng.integers(0, 2, 800)
    x = np.where(comp == 0, rng.normal(2.0, 1.0, 800), rng.normal(-2.0, 1.0, 800))
    data = DataSet(x)
    result = cluster(data, DaSpecParams(bandwidth=0.3))
    spec = KernelSpec("gaussian", 0.3)
    near = np.abs(x - 2.0) < 0.5
    majority = np.bincount(result.labels[near]).argmax()
    assert classify(result, data, spec, np.array([2.0])) == majority


def test_classify_dimension_mismatch():
    data = DataSet([[0.0], [1.0]])
    result = cluster(data, DaSpecParams(bandwidth=1.0))
    spec = KernelSpec("gaussian", 1.0)
    with pytest.raises(InputError):
        classify(result, data, spec, [0.0, 0.0])


def test_classify_rejects_foreign_dataset():
    data = DataSet([[0.0], [1.0], [2.0]])
    result = cluster(data, DaSpecParams(bandwidth=1.0))
    other = DataSet([[0.0], [1.0]])
    with pytest.raises(InputError):
        classify(result, other, KernelSpec("gaussian", 1.0), [0.5])
