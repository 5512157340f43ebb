"""Seeded synthetic datasets: Gaussian mixtures and the ring suite.

All generators run on numpy's PCG64 with one spawned sub-stream per mixture
component, so a dataset is reproducible bit for bit from its seed and
per-component generation is independent of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .kernels import DataSet


@dataclass(frozen=True)
class Gaussian:
    """Isotropic Gaussian component N(mean, sigma^2 I)."""

    mean: tuple
    sigma: float

    def __post_init__(self):
        mean = tuple(float(m) for m in np.atleast_1d(self.mean))
        object.__setattr__(self, "mean", mean)
        if self.sigma < 0.0:
            raise InputError(f"sigma must be nonnegative, got {self.sigma}")

    @property
    def dim(self) -> int:
        return len(self.mean)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(0.0, self.sigma, (size, self.dim)) + np.asarray(self.mean)


@dataclass(frozen=True)
class Ring:
    """Uniform sample from an arc of a circle plus isotropic Gaussian noise.

    Angles are uniform on [0, arc_fraction * 2 pi); the noise is added to
    the 2-D point, not to the radius.
    """

    radius: float
    arc_fraction: float
    noise_sigma: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise InputError(f"radius must be positive, got {self.radius}")
        if not 0.0 < self.arc_fraction <= 1.0:
            raise InputError(f"arc_fraction must be in (0, 1], got {self.arc_fraction}")
        if self.noise_sigma < 0.0:
            raise InputError(f"noise_sigma must be nonnegative, got {self.noise_sigma}")

    @property
    def dim(self) -> int:
        return 2

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        theta = rng.uniform(0.0, self.arc_fraction * 2.0 * np.pi, size)
        points = self.radius * np.column_stack([np.cos(theta), np.sin(theta)])
        if self.noise_sigma > 0.0:
            points = points + rng.normal(0.0, self.noise_sigma, (size, 2))
        return points


@dataclass(frozen=True)
class PointMass:
    """Degenerate component: every draw is the same location."""

    location: tuple

    def __post_init__(self):
        loc = tuple(float(c) for c in np.atleast_1d(self.location))
        object.__setattr__(self, "location", loc)

    @property
    def dim(self) -> int:
        return len(self.location)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.tile(np.asarray(self.location), (size, 1))


@dataclass(frozen=True)
class RingSpec:
    """Ring generator bundled with a sample count (used by the ring suite)."""

    radius: float
    arc_fraction: float
    noise_sigma: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise InputError(f"count must be positive, got {self.count}")

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        ring = Ring(self.radius, self.arc_fraction, self.noise_sigma)
        return ring.sample(rng, self.count)


@dataclass(frozen=True)
class MixtureSpec:
    """Weighted list of components defining a sampling distribution.

    ``components`` is a sequence of ``(weight, generator)`` pairs whose
    weights are positive and sum to 1 (within 1e-12); generators are
    :class:`Gaussian`, :class:`Ring` or :class:`PointMass` instances of a
    common dimension.
    """

    components: tuple

    def __post_init__(self):
        comps = tuple((float(w), g) for w, g in self.components)
        if not comps:
            raise InputError("mixture needs at least one component")
        weights = np.array([w for w, _ in comps])
        if np.any(weights <= 0.0):
            raise InputError("component weights must be positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise InputError(f"weights sum to {weights.sum()!r}, expected 1")
        dims = {g.dim for _, g in comps}
        if len(dims) != 1:
            raise InputError(f"components have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "components", comps)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components])

    @property
    def dim(self) -> int:
        return self.components[0][1].dim


def component_streams(seed, n_components: int):
    """One independent PCG64 stream per component, plus a parent stream."""
    root = np.random.SeedSequence(seed) if not isinstance(seed, np.random.SeedSequence) else seed
    children = root.spawn(n_components + 1)
    parent = np.random.default_rng(children[0])
    return parent, [np.random.default_rng(c) for c in children[1:]]


def gen_gaussian_mixture(spec: MixtureSpec, n: int, seed) -> DataSet:
    """Draw ``n`` points from a mixture with a multinomial component split.

    Ground-truth labels are ``1..G`` in component order.  Deterministic
    given ``(spec, n, seed)``.
    """
    if n < 1:
        raise InputError(f"sample size must be positive, got {n}")
    parent, streams = component_streams(seed, len(spec.components))
    counts = parent.multinomial(n, spec.weights)
    blocks, labels = [], []
    for g, ((_, comp), count) in enumerate(zip(spec.components, counts)):
        if count == 0:
            continue
        blocks.append(comp.sample(streams[g], int(count)))
        labels.append(np.full(int(count), g + 1, dtype=int))
    return DataSet(np.vstack(blocks), np.concatenate(labels))


#: Ground-truth label values emitted by :func:`gen_ring_suite`.
RING_SUITE_LABELS = {"ring": 1, "blob": 2, "small": 3, "outlier": 4}


def gen_ring_suite(noise_add: float, seed) -> DataSet:
    """The four-group ring benchmark (306 points).

    Composition: 200 points from three quarters of a radius-3 ring with
    noise 0.15, plus 100 from N((3, -3), 0.5^2 I), plus 5 from
    N((0, 0), 0.3^2 I), plus one outlier at (5, 5).  ``noise_add > 0`` adds
    fresh independent Gaussian noise of that standard deviation to the
    fixed base coordinates (the base draw depends only on ``seed``), which
    produces the progressively blurred variants of the benchmark.
    """
    if noise_add < 0.0:
        raise InputError(f"noise_add must be nonnegative, got {noise_add}")
    parent, streams = component_streams(seed, 4)
    ring = RingSpec(radius=3.0, arc_fraction=0.75, noise_sigma=0.15, count=200).sample(streams[0])
    blob = Gaussian(mean=(3.0, -3.0), sigma=0.5).sample(streams[1], 100)
    small = Gaussian(mean=(0.0, 0.0), sigma=0.3).sample(streams[2], 5)
    outlier = np.array([[5.0, 5.0]])
    points = np.vstack([ring, blob, small, outlier])
    labels = np.concatenate(
        [
            np.full(200, RING_SUITE_LABELS["ring"]),
            np.full(100, RING_SUITE_LABELS["blob"]),
            np.full(5, RING_SUITE_LABELS["small"]),
            np.full(1, RING_SUITE_LABELS["outlier"]),
        ]
    )
    if noise_add > 0.0:
        points = points + streams[3].normal(0.0, noise_add, points.shape)
    return DataSet(points, labels)
