from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from orbtqft.fusion_data import builtin
from orbtqft.orbifold_datum import datum_from_spherical

settings.register_profile(
    "repo", deadline=None, max_examples=25, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("repo")


@lru_cache(maxsize=None)
def datum(name: str):
    return datum_from_spherical(builtin(name))


@lru_cache(maxsize=None)
def center(name: str):
    from orbtqft.wilson import center_objects_pointed

    return tuple(center_objects_pointed(datum(name)))


@pytest.fixture
def get_datum():
    return datum


@pytest.fixture
def get_center():
    return center


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
