from __future__ import annotations

import pytest

# label -> one [passed, detail] entry per test contributing to the criterion
ACCEPTANCE: dict[str, list[list]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion label")


@pytest.fixture
def verdict(request):
    """Call the returned function after the last assertion of an acceptance test."""
    label = request.node.get_closest_marker("criterion").args[0]
    entry = [False, ""]
    ACCEPTANCE.setdefault(label, []).append(entry)

    def mark(detail: str = ""):
        entry[0] = True
        entry[1] = detail or entry[1]

    def note(detail: str):
        # context shown even when a later assertion fails
        entry[1] = detail

    mark.note = note
    return mark


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: int(s.split(".")[0])):
        entries = ACCEPTANCE[label]
        ok = all(e[0] for e in entries)
        detail = "; ".join(e[1] for e in entries if e[1])
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else ""))
