import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)


_TOY_RUNS = {}


@pytest.fixture(scope="session")
def toy_finals(tmp_path_factory):
    """Final objectives of toy-preset runs, cached per (d, particles)."""
    import dataclasses

    from aiep_pso import experiment

    def get(d, particles=500, seeds=tuple(range(10))):
        key = (d, particles, seeds)
        if key not in _TOY_RUNS:
            spec = experiment.toy_spec(d, seeds=seeds)
            spec = dataclasses.replace(
                spec, pso=dataclasses.replace(spec.pso, particles=particles))
            out = tmp_path_factory.mktemp(f"toy_d{d}_p{particles}")
            _TOY_RUNS[key] = experiment.run_experiment(spec, output_dir=out)
        return _TOY_RUNS[key]

    return get


_ACCEPTANCE = {}


@pytest.fixture
def criterion(capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
        _ACCEPTANCE[number] = line
        with capsys.disabled():
            print("\n" + line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
