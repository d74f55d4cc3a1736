import re

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_results: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance-gate criterion")


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    number = int(m.group(1))
    failed = report.failed or (report.when == "call" and report.outcome != "passed")
    if report.when == "call" or failed:
        prior = _results.get(number, ("PASS", ""))[0]
        status = "FAIL" if failed or prior == "FAIL" else "PASS"
        _results[number] = (status, m.group(2).replace("_", " "))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        status, name = _results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {name}")
    passed = sum(1 for s, _ in _results.values() if s == "PASS")
    terminalreporter.write_line(f"{passed}/{len(_results)} criteria passed")
