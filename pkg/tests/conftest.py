from __future__ import annotations

import contextlib

import pytest

_RESULTS: dict[int, tuple[str, str, str]] = {}


class CriterionRecorder:
    """Collects one pass/fail line per acceptance criterion."""

    @contextlib.contextmanager
    def check(self, number: int, title: str):
        notes: list[str] = []
        try:
            yield notes
        except BaseException:
            _RESULTS[number] = ("FAIL", title, "; ".join(notes))
            print(f"criterion {number:>2} FAIL  {title}  {'; '.join(notes)}")
            raise
        _RESULTS[number] = ("PASS", title, "; ".join(notes))
        print(f"criterion {number:>2} PASS  {title}  {'; '.join(notes)}")


@pytest.fixture(scope="session")
def criteria() -> CriterionRecorder:
    return CriterionRecorder()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        status, title, notes = _RESULTS[n]
        terminalreporter.write_line(f"criterion {n:>2} {status}  {title}" + (f"  ({notes})" if notes else ""))
