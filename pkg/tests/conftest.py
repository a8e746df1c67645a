"""Shared fixtures.

Solving a potential is the only genuinely expensive setup step, so solved
potentials are cached per (model, p, grid) key for the whole session.  The
cache key deliberately uses the factory *name* rather than a model object:
models carry closures and are not hashable by value.
"""

from __future__ import annotations

import functools

import numpy as np
import pytest

import pinchlab as pl

MODEL_FACTORIES = {
    "flat": pl.flat_model,
    "cone": pl.cone_model,
    "power_warp": pl.power_warp_model,
}


@functools.lru_cache(maxsize=None)
def _solve(name: str, p: float, r0: float = 1.0, n_grid: int = 4096, r_max: float | None = None):
    factory = MODEL_FACTORIES[name]
    if r_max is None:
        model = factory()
        return pl.solve_radial(model, p, r0, n_grid=n_grid)
    model = factory(r_max=r_max)
    return pl.solve_radial(model, p, r0, n_grid=n_grid, r_max=r_max)


@pytest.fixture(scope="session")
def solved():
    """Callable (name, p, r0=1.0, n_grid=4096, r_max=None) -> cached RadialPotential."""
    return _solve


@pytest.fixture()
def rng():
    return np.random.default_rng(20260819)
