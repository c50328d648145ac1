import os
import time

import pytest

from zosimplex.experiment import ExperimentConfig, run_experiment

CONVERGENCE_HORIZONS = [10**2, 10**3, 10**4, 10**5]
CONVERGENCE_SEEDS = 20
CONVERGENCE_OBJECTIVE = "quaddist:0.6,0.3,0.1"

_acceptance_lines: list[str] = []


def record(criterion: str, ok: bool, detail: str = "") -> None:
    """Log one acceptance line; printed again in the terminal summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}" + (f": {detail}" if detail else "")
    _acceptance_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def convergence_runs():
    """Both optimizers on the quadratic-distance objective, default constants, 20 seeds.

    Shared by the optimizer examples and the acceptance criteria.
    """
    workers = min(4, os.cpu_count() or 1)
    t0 = time.perf_counter()
    out = {}
    for algo in ("pgd", "ew"):
        cfg = ExperimentConfig(
            algo=algo,
            objective_id=CONVERGENCE_OBJECTIVE,
            d=3,
            horizons=CONVERGENCE_HORIZONS,
            n_seeds=CONVERGENCE_SEEDS,
        )
        out[algo] = run_experiment(cfg, workers=workers)
    out["elapsed"] = time.perf_counter() - t0
    return out
