
import pytest

import watermelon as wm


@pytest.fixture(scope="session")
def grid():
    """Default Painleve grid, solved once per session (no disk cache)."""
    return wm.accumulate_tails(wm.solve_hastings_mcleod())


@pytest.fixture(scope="session")
def shooting_value():
    """Hastings-McLeod q(0) from the event-based shooting oracle."""
    from watermelon.oracles import shooting_q0
    return shooting_q0()


@pytest.fixture(scope="session")
def psis_critical(grid):
    """Psi solution at the critical-kernel argument s = 2^{2/3}."""
    return wm.integrate_psi(2.0 ** (2.0 / 3.0), painleve=grid)


@pytest.fixture(scope="session")
def f1_of(grid):
    def f(k):
        return wm.tracy_widom(k, "F1", grid)
    return f
