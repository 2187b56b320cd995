import itertools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stseq.catalog import affine_plane_3, builtin, fano  # noqa: E402


@pytest.fixture(scope="session")
def fano_sys():
    return fano()


@pytest.fixture(scope="session")
def sts9():
    return affine_plane_3()


@pytest.fixture(scope="session")
def sts13():
    return builtin("STS13-1").system


def all_permutations(v):
    return itertools.permutations(range(v))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
