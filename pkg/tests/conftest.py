from __future__ import annotations

import os

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from fuzzyseq.fuzzy import FuzzyNumber

settings.register_profile("default", max_examples=60, deadline=None, derandomize=True)
settings.register_profile("thorough", max_examples=1000, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

finite = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)


@st.composite
def fuzzy_numbers(draw, max_levels: int = 6, lattice: bool = False):
    """Random piecewise-linear fuzzy numbers: a sorted alpha grid containing
    0 and 1, a non-decreasing lower and a non-increasing upper endpoint.

    With ``lattice`` the inner alphas are multiples of 1e-4, i.e. points of
    the 10,001-point dense grid.
    """
    m = draw(st.integers(min_value=0, max_value=max_levels - 2))
    if lattice:
        ticks = draw(st.lists(st.integers(1, 9_999), min_size=m, max_size=m, unique=True))
        inner = [j / 10_000 for j in ticks]
    else:
        inner = draw(st.lists(st.floats(0.01, 0.99), min_size=m, max_size=m, unique=True))
    alphas = [0.0, *sorted(inner), 1.0]
    centre = draw(finite)
    core = draw(st.floats(0, 5))
    up = draw(st.lists(st.floats(0, 3), min_size=len(alphas) - 1, max_size=len(alphas) - 1))
    down = draw(st.lists(st.floats(0, 3), min_size=len(alphas) - 1, max_size=len(alphas) - 1))
    lo1, hi1 = centre - core / 2, centre + core / 2
    lower = [lo1]
    upper = [hi1]
    for a, b in zip(reversed(up), reversed(down)):
        lower.append(lower[-1] - a)
        upper.append(upper[-1] + b)
    lower.reverse()
    upper.reverse()
    return FuzzyNumber(list(zip(alphas, lower, upper)))


def random_fuzzy(rng: np.random.Generator, levels: int | None = None, lattice: bool = False) -> FuzzyNumber:
    """numpy-driven counterpart of :func:`fuzzy_numbers` for bulk sampling."""
    m = int(rng.integers(2, 9)) if levels is None else levels
    if lattice:
        inner = np.sort(rng.choice(np.arange(1, 10_000), m - 2, replace=False)) / 10_000
    else:
        inner = np.sort(rng.uniform(0.001, 0.999, m - 2))
    alphas = np.concatenate([[0.0], inner, [1.0]])
    centre = rng.uniform(-10, 10)
    core = rng.exponential(1.0)
    lower = centre - core / 2 - np.concatenate([np.cumsum(rng.exponential(1.0, m - 1)[::-1])[::-1], [0.0]])
    upper = centre + core / 2 + np.concatenate([np.cumsum(rng.exponential(1.0, m - 1)[::-1])[::-1], [0.0]])
    return FuzzyNumber(list(zip(alphas, lower, upper)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def catalog_reports(tmp_path_factory):
    """One sequential run of the whole catalog, reports written to disk."""
    from fuzzyseq import harness

    out = tmp_path_factory.mktemp("reports_a")
    summary = harness.run_all(seed=0, out_dir=out)
    return summary, out


# -- acceptance report: one line per criterion ---------------------------------------

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    detail = dict(item.user_properties).get("detail", "")
    _CRITERIA[mark.args[0]] = ("PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {detail}".rstrip())
