# conftest.py
# Shared fixtures: geometry configs, seeded generators, and a clean environment.
import numpy as np
import pytest

from qgeokit.config import make_config


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for key in ("QGEOKIT_SEED", "QGEOKIT_OUT_DIR"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.setenv("QGEOKIT_PROGRESS", "0")


@pytest.fixture
def cfg():
    return make_config(alpha=0.5, n=2)


@pytest.fixture
def cfg_factory():
    def build(n=2, alpha=0.5, **kwargs):
        return make_config(n=n, alpha=alpha, **kwargs)
    return build


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
