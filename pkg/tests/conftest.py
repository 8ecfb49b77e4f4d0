import pytest

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "acceptance" not in report.keywords:
        return
    doc = dict(report.user_properties).get("criterion", report.nodeid.split("::")[-1])
    _ACCEPTANCE.append((doc, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for doc, outcome in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {doc}")


@pytest.fixture
def criterion(record_property):
    """Label an acceptance test; the label shows up in the summary table."""

    def label(text):
        record_property("criterion", text)

    return label
