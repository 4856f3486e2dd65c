"""Collects the acceptance-criterion outcomes and prints one line per criterion."""

import pytest

_OUTCOMES: dict[int, tuple[str, list[str]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    num, title = mark.args
    _, results = _OUTCOMES.setdefault(num, (title, []))
    results.append("PASS" if rep.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_OUTCOMES):
        title, results = _OUTCOMES[num]
        verdict = "PASS" if all(r == "PASS" for r in results) else "FAIL"
        terminalreporter.write_line(f"AC{num} {verdict}  {title}")
