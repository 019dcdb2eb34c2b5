"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.failed or report.skipped:
        detail = dict(report.user_properties).get("detail", "")
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        if name not in _ACCEPTANCE or status != "PASS":
            _ACCEPTANCE[name] = (status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        status, detail = _ACCEPTANCE[name]
        label = name[len("test_criterion_"):]
        line = f"{status} {label}"
        if detail:
            line += f": {detail}"
        terminalreporter.write_line(line)
