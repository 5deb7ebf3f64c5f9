import sys


def pytest_terminal_summary(terminalreporter):
    # One line per acceptance criterion, printed after the normal report.
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
