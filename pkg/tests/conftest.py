import report_log


def pytest_terminal_summary(terminalreporter):
    if not report_log.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in report_log.LINES:
        terminalreporter.write_line(line)
