"""Shared pytest hooks: summarize the acceptance checks as one line each."""


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = {}
    for status, flag in (("passed", "PASS"), ("failed", "FAIL"),
                         ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            if "test_acceptance" in report.nodeid and report.when == "call":
                name = report.nodeid.split("::")[-1]
                results[name] = flag
    if not results:
        return
    terminalreporter.section("acceptance checks")
    for name in sorted(results):
        terminalreporter.write_line(f"{results[name]}: {name}")
