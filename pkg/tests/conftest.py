import math

import numpy as np
import pytest

from sle0.stationary import SystemConfig

PI = math.pi
ODD4 = tuple((2 * k + 1) * PI / 4 for k in range(4))
CUBE = (0.0, 2 * PI / 3, 4 * PI / 3)

# reference systems with their charges
SYSTEMS = {
    "chord_plus": SystemConfig((PI / 2, 3 * PI / 2), (1.0,)),
    "chord_minus": SystemConfig((PI / 2, 3 * PI / 2), (-1.0,)),
    "cube_one": SystemConfig(CUBE, (-1.0,)),
    "rays_odd": SystemConfig(ODD4),
    "rays_even": SystemConfig((0.0, PI / 2, PI, 3 * PI / 2)),
    "unit_pair": SystemConfig(ODD4, (1.0, -1.0)),
    "real_pair": SystemConfig(ODD4, (math.sqrt(2 - math.sqrt(3)), math.sqrt(2 + math.sqrt(3)))),
    "cube_two": SystemConfig(CUBE, (-1.5 + math.sqrt(5) / 2, -1.5 - math.sqrt(5) / 2)),
    "spiral": SystemConfig((0.0,), (), -4.0),
    "radial": SystemConfig((0.0,)),
}

ACCEPTANCE_LINES: list[str] = []


def separated_theta(rng: np.random.Generator, n: int, min_gap: float = 0.4) -> np.ndarray:
    """Sorted angles in [0, 2 pi) whose cyclic gaps all exceed min_gap."""
    while True:
        th = np.sort(rng.uniform(0, 2 * PI, n))
        gaps = np.diff(np.concatenate([th, [th[0] + 2 * PI]]))
        if n == 1 or gaps.min() > min_gap:
            return th


@pytest.fixture
def systems():
    return SYSTEMS


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
