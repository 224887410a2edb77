import pytest

from eitmem.config import default_config


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture(scope="session")
def small_cfg(cfg):
    """Reduced grid and frame counts for end-to-end runs."""
    return cfg.with_overrides({
        "grid.n": 64,
        "grid.pitch": 80e-6,
        "scenario.dual_frames": 20,
        "scenario.photon_sweep": [40.0, 5.3, 1.2],
        "scenario.sweep_frames": [10, 20, 20],
        "scenario.storage_sweep": [0.0, 10e-6, 20e-6, 30e-6],
    })
