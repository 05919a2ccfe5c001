import contextlib
import time

import numpy as np
import pytest

from fluxlab.potential import builtin_potential

_CRITERIA = {}


@pytest.fixture(scope="session")
def sin2():
    return builtin_potential("sin2")


@pytest.fixture(scope="session")
def tilted():
    return builtin_potential("tilted_sin2", [0.3])


@pytest.fixture
def criterion():
    """Context manager recording one pass/fail line per acceptance criterion."""

    @contextlib.contextmanager
    def record(number, title, limit=None):
        notes = []
        start = time.perf_counter()
        try:
            yield notes
        except BaseException as exc:
            elapsed = time.perf_counter() - start
            _CRITERIA[number] = (False, title, elapsed, f"{type(exc).__name__}: {exc}".splitlines()[0])
            raise
        elapsed = time.perf_counter() - start
        if limit is not None and elapsed > limit:
            _CRITERIA[number] = (False, title, elapsed, f"runtime {elapsed:.1f}s over {limit}s")
            raise AssertionError(f"criterion {number} took {elapsed:.1f}s (limit {limit}s)")
        _CRITERIA[number] = (True, title, elapsed, "; ".join(notes))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, title, elapsed, detail = _CRITERIA[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {title}  ({elapsed:.2f}s)  {detail}")
