"""Prints one PASS/FAIL line per acceptance criterion at the end of the session."""

_criteria: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid or report.when != "call" and not report.failed:
        return
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_criterion_"):
        return
    label = name[len("test_criterion_"):]
    if report.failed:
        _criteria[label] = "FAIL"
    elif report.when == "call":
        _criteria.setdefault(label, "PASS" if report.passed else report.outcome.upper())


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_criteria):
        terminalreporter.write_line(f"{_criteria[label]:<5} criterion {label}")
