import sys

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("entobs", max_examples=60, deadline=None)
settings.load_profile("entobs")


def random_hermitian(rng, n=None, scale=1.0):
    shape = (4, 4) if n is None else (n, 4, 4)
    a = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return scale * 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


def bell_projector():
    ket = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return np.outer(ket, ket.conj())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
