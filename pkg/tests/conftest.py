"""Shared fixtures for the pmerge test suite"""

import logging

import numpy as np
import pytest

from pmerge_sdk.cache.coefficient_cache import get_default_cache


@pytest.fixture
def rng():
    """Fresh seeded generator per test"""
    return np.random.default_rng(20240601)


@pytest.fixture
def random_pvectors(rng):
    """
    Factory for random p-value vectors in (0, 1]

    Cubing uniforms puts mass near zero, where the merging functions differ.
    """
    def make(K: int, count: int, power: float = 3.0):
        return [np.maximum(rng.uniform(size=K) ** power, 1e-12) for _ in range(count)]
    return make


@pytest.fixture(autouse=True)
def quiet_logging(caplog):
    caplog.set_level(logging.WARNING)


@pytest.fixture(autouse=True, scope="session")
def no_persisted_coefficients():
    """Tests always solve into the in-memory memo"""
    cache = get_default_cache()
    cache.persist = False
    yield
    cache.clear()
