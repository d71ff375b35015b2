import math

import pytest
from hypothesis import settings

from dressqed import ModelParams, MomentumGrid

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ALPHA_FS = 1 / 137


@pytest.fixture(scope="session")
def params_e10():
    return ModelParams.from_ratio(ALPHA_FS, math.exp(10))


@pytest.fixture(scope="session")
def solved_e10(params_e10):
    from dressqed import solve_fixed_point
    return solve_fixed_point(params_e10)


@pytest.fixture(scope="session")
def small_grid(params_e10):
    return MomentumGrid.log_uniform(params_e10.cutoff, 64, 1e-8)



def pytest_terminal_summary(terminalreporter):
    import sys
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
