import pytest

_detail = pytest.StashKey[str]()
_verdicts: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Attach a one-line detail to an acceptance test; the verdict comes from its outcome."""
    request.node.stash[_detail] = ""

    def note(detail: str) -> None:
        request.node.stash[_detail] = detail

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and _detail in item.stash:
        _verdicts.append((item.name, report.passed, item.stash[_detail]))


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _verdicts:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
