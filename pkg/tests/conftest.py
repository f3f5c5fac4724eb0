import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from motionid import Signal

# numba compilation and shared fixtures can blow hypothesis' per-example
# deadline; wall-clock limits are asserted explicitly where they matter.
settings.register_profile(
    "motionid",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("motionid")


def make_signal(rng: np.random.Generator, n_channels: int = 6, length: int = 150) -> Signal:
    return Signal(rng.normal(0.0, 1.0, size=(n_channels, length)))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
