from __future__ import annotations

import pytest

from fatkappa.mad import McConfig

# (criterion id, passed, detail) in execution order; printed at the end of the run.
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running Monte Carlo (minutes)")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for cid, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{cid:<4} {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def report():
    """Record and print one acceptance line, then assert it."""
    def _report(cid: str, ok: bool, detail: str) -> None:
        ACCEPTANCE.append((cid, bool(ok), detail))
        print(f"{cid} {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, f"criterion {cid} failed: {detail}"
    return _report


@pytest.fixture
def small_mc():
    return McConfig(samples=200_000, batches=32, seed=7)
