import numpy as np
import pytest


def random_log_emissions(rng, T, K, alpha=1.0):
    probs = rng.dirichlet(np.full(K, alpha), size=T)
    return np.log(probs)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        label = dict(report.user_properties).get("criterion", report.nodeid)
        detail = dict(report.user_properties).get("detail", "")
        _acceptance.append((label, report.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in sorted(_acceptance):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
