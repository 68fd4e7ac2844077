def pytest_terminal_summary(terminalreporter):
    """Echo the report-suite acceptance lines after the captured-output phase."""
    import sys

    mod = sys.modules.get("test_report_acceptance")
    lines = getattr(mod, "RESULTS", None) if mod else None
    if lines:
        terminalreporter.section("report acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
