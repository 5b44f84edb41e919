import re

import pytest

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion listed in the terminal summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if rep.when == "call" or rep.skipped or rep.failed:
        if rep.skipped:
            status = "SKIP"
            detail = rep.longrepr[2] if isinstance(rep.longrepr, tuple) else str(rep.longrepr)
            detail = re.sub(r"^Skipped: ", "", detail)
        else:
            status = "PASS" if rep.passed else "FAIL"
            detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        _CRITERIA[label] = (status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: int(re.sub(r"\D", "", s.split()[0]) or 0)):
        status, detail = _CRITERIA[label]
        terminalreporter.write_line(f"{status:4}  {label}" + (f"  [{detail}]" if detail else ""))
