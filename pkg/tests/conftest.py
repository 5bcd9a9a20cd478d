from __future__ import annotations

from collections import defaultdict

import pytest

# criterion number -> list of (test id, passed)
_CRITERIA: dict[int, list[tuple[str, bool]]] = defaultdict(list)
_TITLES: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number = mark.args[0]
    _TITLES.setdefault(number, mark.args[1] if len(mark.args) > 1 else "")
    # an xfail is a criterion failure that is documented, not a pass
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        passed = rep.passed and not hasattr(rep, "wasxfail")
        _CRITERIA[number].append((item.callspec.id if hasattr(item, "callspec") else item.name, passed))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        runs = _CRITERIA[number]
        failed = [name for name, ok in runs if not ok]
        verdict = "PASS" if not failed else "FAIL"
        detail = f"{len(runs) - len(failed)}/{len(runs)} cases pass"
        if failed:
            detail += "; failing: " + ", ".join(failed)
        tr.write_line(f"criterion {number} [{verdict}] {_TITLES[number]}: {detail}")
