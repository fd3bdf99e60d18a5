import json
from importlib import resources

import pytest

from orlicz_gauss.gauss_space import gauss_hermite
from orlicz_gauss.inequalities import load_catalog

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def gh1():
    return gauss_hermite(64, 1)


@pytest.fixture(scope="session")
def gh2():
    return gauss_hermite(40, 2)


@pytest.fixture(scope="session")
def catalog_json():
    return json.loads(resources.files("orlicz_gauss").joinpath("data/catalog.json").read_text())


@pytest.fixture(scope="session")
def catalog(catalog_json):
    return load_catalog(catalog_json)


@pytest.fixture
def acceptance():
    """Record ``(criterion, ok, detail)``; printed in the terminal summary."""

    def record(criterion, ok, detail=""):
        _ACCEPTANCE.append((criterion, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
