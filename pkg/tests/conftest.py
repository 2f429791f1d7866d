import numpy as np
import pytest

from hdsim import noise


@pytest.fixture
def line_path():
    """Deterministic path ``t -> t`` on a level-6 grid."""
    p = noise.make_partition(1.0, 6)
    return noise.Path(p, p.times.copy())


def bm_batch(level, n, seed=7, stream=noise.STREAM_B, t_end=1.0):
    p = noise.make_partition(t_end, level)
    return p, np.stack([noise.sample_bm(p, seed, i, stream).values for i in range(n)])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
