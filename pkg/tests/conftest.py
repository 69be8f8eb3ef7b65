import pytest

_acceptance_results: list[tuple[str, bool]] = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): acceptance criterion label"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        _acceptance_results.append((marker.args[0], report.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, passed in _acceptance_results:
        terminalreporter.write_line(
            f"  [{'PASS' if passed else 'FAIL'}] {name}"
        )
