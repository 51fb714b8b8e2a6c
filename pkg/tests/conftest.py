import os

import pytest

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fixture_paths():
    paths = {name: os.path.join(DATA_DIR, f"{name}.csv")
             for name in ("persons", "footsteps", "cities")}
    for p in paths.values():
        assert os.path.exists(p), f"fixture missing: {p} (run tests/data/make_fixture.py)"
    return paths


@pytest.fixture(scope="session")
def prepared(fixture_paths):
    """Shared prepared dataset (window 1900-1950, min age 20)."""
    from radiant import pipeline

    persons_res, footsteps_res, cities, _ = pipeline.load_inputs(
        fixture_paths["persons"], fixture_paths["footsteps"], fixture_paths["cities"])
    return pipeline.prepare(persons_res, footsteps_res, cities, (1900, 1950), 20)
