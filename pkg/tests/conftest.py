"""Shared fixtures.

Real arithmetic data comes from holomorphic eta-quotient newforms, whose
q-expansions are exact integers:

* eta(z)^4 eta(5z)^4, weight 4, level 5;
* eta(z)^2 eta(11z)^2, weight 2, level 11.

With lambda(n) = a(n) / n^((k-1)/2) these satisfy the same summation formula
as a Maass form with 2ir = k - 1, i.e. r = -i (k-1)/2, so they exercise the
dual expansion end to end without any external download.

The level-5 Maass form table is not bundled.  Point ``MAASS_LEVEL5_FIXTURE``
at a CSV/JSON table (n >= 4400) or drop it at ``tests/data/maass_level5.csv``.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from maass_resonance.cutoff import standard_bump
from maass_resonance.ingest import FourierCoefficientTable, TableMeta, load_coefficients

DATA = Path(__file__).parent / "data"
MAASS_R = 8.01848237839
FIXTURE_MIN_N = 4400


def eta_product(factors: dict[int, int], n_max: int) -> np.ndarray:
    """Coefficients a(1..n_max) of q^s prod_m eta(m z)^e where s = sum m e / 24.

    Only shifts s = 1 are supported (true for both forms used here).
    """
    shift = sum(m * e for m, e in factors.items())
    assert shift == 24, "expected a q^1 leading term"
    series = np.zeros(n_max, dtype=np.int64)
    series[0] = 1
    for m, e in factors.items():
        for step in range(m, n_max, m):
            for _ in range(e):
                series[step:] -= series[: n_max - step].copy()
    return series  # a(n) = series[n - 1]


def holomorphic_table(factors: dict[int, int], weight: int, level: int, n_max: int) -> FourierCoefficientTable:
    a = eta_product(factors, n_max).astype(float)
    n = np.arange(1, n_max + 1, dtype=float)
    return FourierCoefficientTable(a / n ** ((weight - 1) / 2), TableMeta(claimed_level=level, self_dual=True))


@pytest.fixture(scope="session")
def bump():
    return standard_bump()


@pytest.fixture(scope="session")
def level5_holo():
    """Weight-4 level-5 newform; r = -1.5i in the Maass dictionary."""
    return holomorphic_table({1: 4, 5: 4}, 4, 5, 4500)


@pytest.fixture(scope="session")
def level11_holo():
    """Weight-2 level-11 newform (elliptic curve 11a); r = -0.5i."""
    return holomorphic_table({1: 2, 11: 2}, 2, 11, 4500)


def fixture_path() -> Path | None:
    env = os.environ.get("MAASS_LEVEL5_FIXTURE")
    if env:
        return Path(env)
    for name in ("maass_level5.csv", "maass_level5.json"):
        if (DATA / name).exists():
            return DATA / name
    return None


@pytest.fixture(scope="session")
def maass_level5():
    path = fixture_path()
    if path is None or not path.exists():
        pytest.skip("SKIPPED(FIXTURE): level-5 Maass coefficient table not available")
    table = load_coefficients(path)
    if table.n_max < FIXTURE_MIN_N:
        pytest.skip(f"SKIPPED(FIXTURE): table stops at n={table.n_max} < {FIXTURE_MIN_N}")
    return table


# --- acceptance report ------------------------------------------------------------


@pytest.fixture
def criterion(record_property):
    """Record the one-line verdict of an acceptance criterion, then assert it."""

    def check(number: int, ok: bool, detail: str):
        record_property("criterion", f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return check


def pytest_terminal_summary(terminalreporter):
    lines = []
    for reports in terminalreporter.stats.values():
        for rep in reports:
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid or not hasattr(rep, "when"):
                continue
            props = dict(getattr(rep, "user_properties", ()))
            if rep.when == "call" and "criterion" in props:
                lines.append(props["criterion"])
            elif rep.skipped:
                number = int(nodeid.split("test_criterion_")[1][:2])
                reason = rep.longrepr[2] if isinstance(rep.longrepr, tuple) else str(rep.longrepr)
                lines.append(f"criterion {number:>2}: {reason.removeprefix('Skipped: ')}")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
