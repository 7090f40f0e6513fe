import numpy as np
import pytest

from mimo_ba.channel import ChannelDecomposition


def random_semi_unitary(rng, rows, cols):
    a = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, _ = np.linalg.qr(a)
    return q


def random_decomposition(rng, n_r=16, n_s=4, lo=0.5, hi=5.0):
    u = random_semi_unitary(rng, n_r, n_s)
    v = random_semi_unitary(rng, n_r, n_s)
    sigma = np.sort(rng.uniform(lo, hi, n_s))[::-1]
    return ChannelDecomposition(u=u, sigma=sigma, f_opt=v)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# Acceptance outcomes, one line per criterion, printed after the run.
ACCEPTANCE = {}


def record_criterion(number, ok, detail):
    ACCEPTANCE[number] = (ok, detail)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} | {detail}")
