import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from airybeam.scenario import (  # noqa: E402
    SPEED_OF_LIGHT,
    ArrayGeometry,
    GridConfig,
    Obstacle,
    Scenario,
    validate_scenario,
)

LAM100 = SPEED_OF_LIGHT / 100e9
REF_USER = (1.1, 0.17)
MC_SEED = 12345
MC_REGION = (1.0, 5.0, -0.4, 0.4)

# lines printed by the acceptance module, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def make_scene(n=16, x_max=1.0, y_halfspan=0.2, obstacles=(), power=1.0, **grid):
    return validate_scenario(
        Scenario(
            100e9,
            power,
            ArrayGeometry(n, LAM100 / 2),
            GridConfig(y_halfspan=y_halfspan, x_max=x_max, **grid),
            obstacles=tuple(obstacles),
        )
    )


@pytest.fixture(scope="session")
def small_scene():
    return make_scene()


@pytest.fixture(scope="session")
def small_blocked_scene():
    return make_scene(n=32, x_max=0.6, y_halfspan=0.15, obstacles=[Obstacle(0.2, 0.25, -0.02, 0.03)])


@pytest.fixture(scope="session")
def ref_scene():
    return make_scene(n=266, x_max=1.2, y_halfspan=0.5, power=5.0, obstacles=[Obstacle(0.9, 1.1, -0.15, 0.15)])


@pytest.fixture(scope="session")
def ref_channel(ref_scene):
    from airybeam.propagation import channel_matrix

    return channel_matrix(ref_scene, [REF_USER])[0]


@pytest.fixture(scope="session")
def mc_scene():
    return make_scene(n=266, x_max=5.0, y_halfspan=0.5, power=5.0, obstacles=[Obstacle(1.0, 1.2, -0.1, 0.1)])


@pytest.fixture(scope="session")
def mc_data(mc_scene):
    """200 seeded users in the Monte-Carlo region with cached channels."""
    from airybeam.harness import draw_users
    from airybeam.propagation import channel_matrix
    from airybeam.training import blockage_ratio

    rng = np.random.Generator(np.random.PCG64(MC_SEED))
    users = draw_users(mc_scene, MC_REGION, 200, rng)
    H = channel_matrix(mc_scene, users)
    ratios = np.array([blockage_ratio(mc_scene, u) for u in users])
    return users, H, ratios


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
