import pytest

_outcomes: dict[str, list[bool]] = {}
_details: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = getattr(report, "criterion", None)
    if not name:
        return
    _outcomes.setdefault(name, []).append(report.outcome == "passed")
    for line in report.capstdout.splitlines():
        verdict, _, rest = line.partition("  ")
        if verdict in ("PASS", "FAIL") and rest.startswith(f"{name}: "):
            _details[name] = rest[len(name) + 2 :]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name, results in _outcomes.items():
        verdict = "PASS" if all(results) else "FAIL"
        detail = _details.get(name)
        terminalreporter.write_line(f"{verdict}  {name}" + (f": {detail}" if detail else ""))
