"""Acceptance reporting: one PASS/FAIL line per criterion in the terminal summary."""
import pytest

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): numbered acceptance criterion")
    config.stash[_RESULTS] = {}


@pytest.fixture
def detail(request):
    """Attach a short measurement string to the running criterion."""

    def record(text: str) -> None:
        print(text)
        request.node.user_properties.append(("detail", text))

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    failed_early = call.when == "setup" and report.outcome != "passed"
    if call.when != "call" and not failed_early:
        return
    number, title = marker.args
    notes = "; ".join(v for k, v in item.user_properties if k == "detail")
    status = "PASS" if report.outcome == "passed" else "FAIL"
    item.config.stash[_RESULTS][number] = (title, status, notes)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, status, notes = results[number]
        line = f"[{status}] criterion {number:>2}: {title}"
        if notes:
            line += f" | {notes}"
        terminalreporter.write_line(line)
