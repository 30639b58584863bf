import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def l2_fit_data():
    """(sigma, L_2(sigma)) on the 24-point geometric grid [1e-3, 0.3] used for main-term fits."""
    from zetalaplace import closed_forms as cf

    lo, hi, n = cf.FIT_GRID
    sig = np.geomspace(lo, hi, n)
    return sig, cf.l2_values(sig)


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture()
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        _ACCEPTANCE[number] = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title} -- {detail}"
        print(_ACCEPTANCE[number])
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
