from collections import defaultdict

import pytest

_CRITERIA: dict[int, list[tuple[str, bool, str]]] = defaultdict(list)


class CriterionLog:
    def record(self, criterion: int, name: str, passed: bool, detail: str) -> bool:
        _CRITERIA[criterion].append((name, bool(passed), detail))
        return bool(passed)


@pytest.fixture(scope="session")
def criteria() -> CriterionLog:
    return CriterionLog()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(_CRITERIA):
        parts = _CRITERIA[c]
        ok = all(p for _, p, _ in parts)
        failing = [f"{n}: {d}" for n, p, d in parts if not p]
        shown = failing if failing else [f"{n}: {d}" for n, _, d in parts]
        terminalreporter.write_line(f"criterion {c:>2}: {'PASS' if ok else 'FAIL'} | " + " | ".join(shown))
