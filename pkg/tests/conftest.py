import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from coopbc.channel import AuxScheme, BinarySymmetricBC, ChannelSpec, to_channel_spec  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).resolve().parents[1] / "src" / "coopbc" / "data"

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])


def kernel(rng, shape):
    """Random stochastic table normalized over the last axis."""
    t = rng.dirichlet(np.ones(shape[-1]), size=shape[:-1])
    return t.reshape(shape)


def random_channel(rng, s=2, x=2, y=2, z=2) -> ChannelSpec:
    return ChannelSpec.from_arrays(rng.dirichlet(np.ones(s)), kernel(rng, (s, x, y)), kernel(rng, (y, z)))


def random_noncausal(rng, s=2, u=2, x=2) -> AuxScheme:
    return AuxScheme.noncausal(kernel(rng, (s, u)), kernel(rng, (s, u, x)))


def random_rate_limited(rng, s=2, sd=2, u=2, x=2) -> AuxScheme:
    return AuxScheme.rate_limited(kernel(rng, (s, sd * u * x)).reshape(s, sd, u, x))


@pytest.fixture
def bsc_channel():
    return to_channel_spec(BinarySymmetricBC(0.2, 0.3))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
