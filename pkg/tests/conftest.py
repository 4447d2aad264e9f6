import math
import sys

import pytest

from vcsel_cov.env import VCSELEnv
from vcsel_cov.scene import SceneConfig


@pytest.fixture(scope="session")
def cfg():
    return SceneConfig()


@pytest.fixture(scope="session")
def warm_env(cfg):
    """Default environment with the full 4 x 16 reward table computed once."""
    env = VCSELEnv(cfg)
    env.warm()
    return env


@pytest.fixture
def small_cfg():
    """3x3 emitters over a 5x5 grid, literal optical model."""
    return SceneConfig(
        grid_step=2.0,
        n_tx_side=3,
        n0=1e-9,
        beam_width_scale=1.0,
        sinr_domain="optical",
        divergences=tuple(math.radians(t) for t in (8, 10, 12)),
    )


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    report = getattr(mod, "REPORT", None)
    if report:
        terminalreporter.section("acceptance criteria")
        for n in sorted(report):
            terminalreporter.write_line(report[n])
