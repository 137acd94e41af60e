import numpy as np
import pytest

from drury_arveson.h2space import Poly
from drury_arveson.multiindex import enumerate_upto


def random_unitary(d, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_poly(d, degree, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    return Poly(d, {a: scale * complex(*rng.standard_normal(2)) for a in enumerate_upto(d, degree)})


def random_ball_point(d, seed, radius=0.9):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z) * radius * rng.random() ** (1 / (2 * d))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance summary --------------------------------------------------------

_criteria: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    marker = "test_acceptance.py::test_criterion_"
    if marker not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        number = int(report.nodeid.split(marker)[1].split("_")[0])
        _criteria.setdefault(number, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        ok = all(o == "passed" for o in _criteria[number])
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}")
