"""Shared pytest fixtures."""
from __future__ import annotations

import numpy as np
import pytest

from funcs.corpus import corpus


@pytest.fixture(scope="session")
def functions():
    return corpus()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def circle():
    """100 points on |z| = 1."""
    return np.exp(2j * np.pi * np.arange(100) / 100)
