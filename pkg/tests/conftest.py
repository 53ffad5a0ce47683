import pytest

from faplab.fap import ChannelGeometry, DriftVector
from faplab.sim import SimConfig, simulate_first_arrival


@pytest.fixture(scope="session")
def reference_em_run():
    """The heavy zero-drift Euler run shared by the acceptance tests.

    2D, lam = sigma2 = 1, dt = 1e-4, N = 1e5, max_steps = 1e7.
    """
    cfg = SimConfig(
        geometry=ChannelGeometry(2, 1.0, 1.0),
        drift=DriftVector(0.0, 0.0),
        dt=1e-4,
        n_particles=100_000,
        max_steps=10_000_000,
        seed=42,
    )
    return simulate_first_arrival(cfg)
