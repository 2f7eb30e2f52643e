import pytest

from kptau.correlators import free_energy
from kptau.tau import compute_tau_cutjoin, compute_tau_linear


@pytest.fixture(scope="session")
def tau6():
    return compute_tau_cutjoin(6)


@pytest.fixture(scope="session")
def tau8(tau6):
    return compute_tau_cutjoin(8, start=tau6)


@pytest.fixture(scope="session")
def linear6():
    return compute_tau_linear(6)


@pytest.fixture(scope="session")
def F6(tau6):
    return free_energy(tau6)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
