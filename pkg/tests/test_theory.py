import math

import numpy as np
import pytest

from daspec import (
    DataSet,
    Gaussian,
    InputError,
    KernelSpec,
    MixtureSpec,
    PointMass,
    check_compact_bound,
    check_eigenfunction_perturbation,
    check_interleaving,
    check_tail_bound,
    check_top_eigenvalue_bound,
    compute_r,
    eigendecompose,
    extend_eigenfunction,
    kernel_matrix,
)

GAUSS03 = KernelSpec("gaussian", 0.3)


def small_dataset(seed, n=80, d=2, scale=1.0):
    rng = np.random.default_rng(seed)
    return DataSet(rng.normal(0.0, scale, (n, d)))


def two_gaussians(mu1, mu2, pi1=0.5, sigma=1.0):
    return MixtureSpec((
        (pi1, Gaussian((mu1,), sigma)),
        (1.0 - pi1, Gaussian((mu2,), sigma)),
    ))


# ---------------------------------------------------------------------------
# exact empirical inequalities


def test_tail_bound_at_sample_points():
    data = small_dataset(1)
    spec = KernelSpec("gaussian", 0.5)
    eig = eigendecompose(kernel_matrix(spec, data))
    report = check_tail_bound(spec, data, eig, data.points)
    assert report.passed and report.margin >= -1e-10


def test_tail_bound_far_point_both_sides_tiny():
    rng = np.random.default_rng(2)
    data = DataSet(rng.normal(2.0, 1.0, 400))
    eig = eigendecompose(kernel_matrix(GAUSS03, data))
    x = np.array([[10.0]])
    report = check_tail_bound(GAUSS03, data, eig, x)
    assert report.passed
    lam, v = eig.values[0], eig.vectors[:, 0]
    phi = extend_eigenfunction(GAUSS03, data, (lam, v), x[0])
    assert abs(phi) < 1e-15  # exp(-50)-scale values


def test_tail_bound_random_sweep():
    for seed in range(5):
        data = small_dataset(seed, n=200)
        spec = KernelSpec("gaussian", 0.4)
        eig = eigendecompose(kernel_matrix(spec, data))
        pts = np.random.default_rng(seed + 100).uniform(-5, 5, (100, 2))
        report = check_tail_bound(spec, data, eig, pts)
        assert report.passed, report.line()


def test_compact_bound_touching_sample():
    data = small_dataset(3)
    spec = KernelSpec("gaussian", 0.5)
    eig = eigendecompose(kernel_matrix(spec, data))
    report = check_compact_bound(spec, data, eig, data.points[0])
    # dist = 0, so the bound is 1/lam, satisfied by every unit eigenvector.
    assert report.passed


def test_compact_bound_far_point():
    data = small_dataset(4, n=60, d=1)
    spec = KernelSpec("gaussian", 0.5)
    eig = eigendecompose(kernel_matrix(spec, data))
    x = np.array([data.points[:, 0].max() + 5.0 * spec.bandwidth])
    report = check_compact_bound(spec, data, eig, x)
    assert report.passed


def test_compact_bound_ray_sweep():
    data = small_dataset(5, n=100)
    for family in ("gaussian", "exponential"):
        spec = KernelSpec(family, 0.5)
        eig = eigendecompose(kernel_matrix(spec, data))
        ray = np.array([[1.0, 0.7]]) * np.linspace(0.0, 8.0, 40)[:, None]
        report = check_compact_bound(spec, data, eig, ray)
        assert report.passed, report.line()


def test_exact_bounds_zero_violations_many_datasets():
    # The inequalities are exact for the empirical operator: no violations
    # beyond 1e-10 on any dataset, any eigenpair above the floor.
    for seed in range(25):
        rng = np.random.default_rng([seed, 77])
        n = int(rng.integers(20, 90))
        d = int(rng.integers(1, 4))
        data = DataSet(rng.normal(0, rng.uniform(0.5, 2.0), (n, d)))
        spec = KernelSpec("gaussian" if seed % 2 == 0 else "exponential",
                          float(rng.uniform(0.2, 1.5)))
        eig = eigendecompose(kernel_matrix(spec, data))
        pts = rng.uniform(-4, 4, (30, d))
        assert check_tail_bound(spec, data, eig, pts).passed
        assert check_compact_bound(spec, data, eig, pts).passed


# ---------------------------------------------------------------------------
# overlap constant


def test_r_vanishing_weight():
    est = compute_r(GAUSS03, Gaussian((0.0,), 1.0), Gaussian((0.0,), 1.0), (1.0, 0.0))
    assert est.value == 0.0


def test_r_identical_components_mc_vs_closed_form():
    comp = Gaussian((0.0,), 1.0)
    est = compute_r(GAUSS03, comp, comp, (0.5, 0.5), mc_samples=40_000, seed=3)
    assert est.closed_form is not None
    assert abs(est.value - est.closed_form) <= 3.0 * est.std_error


def test_r_decreases_with_separation():
    previous = None
    for sep in (0.0, 1.0, 2.0, 3.0, 4.0):
        est = compute_r(GAUSS03, Gaussian((sep / 2,), 1.0), Gaussian((-sep / 2,), 1.0),
                        (0.5, 0.5), mc_samples=30_000, seed=int(sep * 10))
        assert est.closed_form is not None
        if previous is not None:
            # Closed forms are exact, so the monotonicity is strict; the MC
            # estimates agree within their error bars.
            assert est.closed_form < previous
        assert abs(est.value - est.closed_form) <= 4.0 * est.std_error
        previous = est.closed_form


def test_r_closed_form_matches_direct_quadrature():
    # Independent oracle: numerically integrate K^2 against both densities.
    from scipy.integrate import dblquad

    omega, mu1, mu2, s1, s2 = 0.6, 0.8, -0.4, 0.9, 1.3
    est = compute_r(KernelSpec("gaussian", omega), Gaussian((mu1,), s1),
                    Gaussian((mu2,), s2), (0.4, 0.6), mc_samples=1000, seed=0)

    def integrand(y, x):
        k2 = math.exp(-((x - y) ** 2) / omega**2)
        px = math.exp(-((x - mu1) ** 2) / (2 * s1**2)) / (s1 * math.sqrt(2 * math.pi))
        py = math.exp(-((y - mu2) ** 2) / (2 * s2**2)) / (s2 * math.sqrt(2 * math.pi))
        return k2 * px * py

    integral, _ = dblquad(integrand, -8, 8, -8, 8, epsabs=1e-10)
    assert est.closed_form == pytest.approx(math.sqrt(0.4 * 0.6 * integral), rel=1e-6)


def test_r_requires_enough_samples():
    with pytest.raises(InputError):
        compute_r(GAUSS03, Gaussian((0.0,), 1.0), Gaussian((0.0,), 1.0), (0.5, 0.5),
                  mc_samples=10)


# ---------------------------------------------------------------------------
# top eigenvalue sandwich


def test_sandwich_single_component_tight():
    mixture = MixtureSpec(((1.0, Gaussian((0.0,), 1.0)),))
    report = check_top_eigenvalue_bound(GAUSS03, mixture, n=200, seed=1)
    assert report.bound_satisfied
    assert report.r == 0.0
    assert report.lambda0 == pytest.approx(report.lambda0_parts[0], rel=1e-12)


def test_sandwich_bimodal_mixture():
    report = check_top_eigenvalue_bound(GAUSS03, two_gaussians(2.0, -2.0), n=400, seed=2)
    assert report.bound_satisfied
    assert report.details["lower_margin"] > 0.0
    assert report.details["upper_margin"] > 0.0


def test_sandwich_lower_bound_on_fifty_instances():
    # The lower bound max(pi_g lambda_0^g) <= lambda_0 + slack must hold on
    # every seeded instance.
    for seed in range(50):
        sep = 1.0 + (seed % 7)
        report = check_top_eigenvalue_bound(GAUSS03, two_gaussians(sep / 2, -sep / 2),
                                            n=150, seed=seed)
        assert report.details["lower_margin"] >= 0.0, (seed, report.details)
        assert report.bound_satisfied, (seed, report.details)


def test_sandwich_gap_shrinks_with_separation():
    gaps = []
    for sep in (0.0, 2.0, 4.0, 6.0, 8.0):
        report = check_top_eigenvalue_bound(GAUSS03, two_gaussians(sep / 2, -sep / 2),
                                            n=500, seed=11)
        gaps.append(report.lambda0 - max(report.lambda0_parts))
    slack = 3.0 / math.sqrt(500)
    for a, b in zip(gaps, gaps[1:]):
        assert b <= a + slack


def test_sandwich_with_ring_component_uses_monte_carlo_r():
    # No closed form exists for a ring component, so r comes from the MC
    # route; the sandwich must still hold.
    from daspec import Ring

    mixture = MixtureSpec((
        (0.6, Ring(radius=3.0, arc_fraction=0.75, noise_sigma=0.15)),
        (0.4, Gaussian((8.0, 8.0), 0.5)),
    ))
    spec = KernelSpec("gaussian", 0.5)
    report = check_top_eigenvalue_bound(spec, mixture, n=250, seed=21)
    assert report.bound_satisfied, report.details
    assert report.r > 0.0


def test_sandwich_rejects_degenerate_component():
    mixture = MixtureSpec((
        (0.5, PointMass((0.0,))),
        (0.5, Gaussian((3.0,), 1.0)),
    ))
    with pytest.raises(InputError):
        check_top_eigenvalue_bound(GAUSS03, mixture, n=50, seed=0)


# ---------------------------------------------------------------------------
# eigenfunction perturbation


def test_perturbation_single_component_exact():
    mixture = MixtureSpec(((1.0, Gaussian((0.0,), 1.0)),))
    report = check_eigenfunction_perturbation(GAUSS03, mixture, n=200, seed=4)
    assert report.applicable and report.bound_satisfied
    assert report.epsilon == 0.0
    assert report.details["distance"] == 0.0


def test_perturbation_separated_unbalanced_mixture():
    mixture = two_gaussians(0.0, 6.0, pi1=0.95, sigma=0.5)
    report = check_eigenfunction_perturbation(GAUSS03, mixture, n=500, seed=5)
    assert report.applicable, (report.epsilon, report.r, report.t)
    assert report.bound_satisfied, report.details
    assert report.epsilon + report.r < report.t


def test_perturbation_overlapping_mixture_not_applicable():
    report = check_eigenfunction_perturbation(GAUSS03, two_gaussians(0.5, -0.5),
                                              n=300, seed=6)
    assert not report.applicable
    assert report.epsilon + report.r >= report.t
    assert report.status == "NOT-APPLICABLE"


def test_perturbation_report_fields():
    mixture = two_gaussians(0.0, 6.0, pi1=0.9, sigma=0.5)
    report = check_eigenfunction_perturbation(GAUSS03, mixture, n=300, seed=7)
    assert report.t >= 0.0 and report.r >= 0.0
    assert len(report.lambda0_parts) == 2
    assert report.s is not None and report.s >= 0.0


# ---------------------------------------------------------------------------
# interleaving


def test_interleaving_identical_components_degenerate_pairs():
    mixture = two_gaussians(3.0, -3.0)
    report = check_interleaving(GAUSS03, mixture, n=400, k=6, seed=8)
    assert report.passed, report.details
    top = report.details["empirical_top"]
    # Equal weights and identical shapes: eigenvalues arrive in near Pairs.
    for j in (0, 2, 4):
        assert abs(top[j] - top[j + 1]) <= 0.15 * top[j]
    owners = report.details["owners"]
    assert owners[0] != owners[1]


def test_interleaving_redundancy_phenomenon():
    mixture = two_gaussians(0.0, 6.0, pi1=0.95, sigma=0.5)
    report = check_interleaving(GAUSS03, mixture, n=600, k=8, seed=9)
    assert report.passed, report.details
    owners = report.details["owners"]
    concentration = report.details["concentration"]
    # Several leading eigenvectors witness component 1 before component 2
    # shows up at all.
    first_minor = owners.index(1)
    assert first_minor >= 2
    assert all(c >= 0.8 for c in concentration)


def test_interleaving_single_component_trivial():
    mixture = MixtureSpec(((1.0, Gaussian((0.0,), 1.0)),))
    report = check_interleaving(GAUSS03, mixture, n=300, k=4, seed=10)
    assert report.passed
    emp = np.array(report.details["empirical_top"])
    merged = np.array(report.details["merged_top"])
    assert np.allclose(emp, merged, rtol=1e-12)


def test_interleaving_validates_k():
    mixture = MixtureSpec(((1.0, Gaussian((0.0,), 1.0)),))
    with pytest.raises(InputError):
        check_interleaving(GAUSS03, mixture, n=50, k=0, seed=0)
    with pytest.raises(InputError):
        check_interleaving(GAUSS03, mixture, n=50, k=51, seed=0)
