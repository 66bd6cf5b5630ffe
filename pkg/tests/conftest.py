"""Shared fixtures: catalog models and seeded random point generators."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from gacount import geometry, heights

ALL_MODEL_IDS = list(geometry.MODEL_IDS)


@pytest.fixture(params=ALL_MODEL_IDS)
def model(request):
    return geometry.load_model(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(91604)


def random_point(rng: np.random.Generator, dim: int) -> heights.RationalPoint:
    """A random nonzero affine rational point with small entries."""
    while True:
        nums = rng.integers(-9, 10, size=dim)
        dens = rng.integers(1, 10, size=dim)
        if any(nums):
            return heights.RationalPoint.from_affine(
                [Fraction(int(a), int(b)) for a, b in zip(nums, dens)]
            )


def random_interior(rng: np.random.Generator, rank: int) -> tuple:
    """A random integer Picard vector in the interior of the effective cone."""
    return tuple(int(v) for v in rng.integers(1, 5, size=rank))
