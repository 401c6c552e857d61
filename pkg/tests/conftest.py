import sys
from collections import defaultdict
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, dict] = defaultdict(lambda: {"title": "", "passed": 0, "failed": []})


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            item.user_properties.append(("criterion", mark.args))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when != "call" and not (report.failed or report.skipped):
        return
    number, title = props["criterion"]
    entry = _criteria[number]
    entry["title"] = title
    if report.when == "call" and report.passed:
        entry["passed"] += 1
    elif report.failed or report.skipped:
        entry["failed"].append(report.nodeid.split("::")[-1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        verdict = "FAIL" if entry["failed"] else "PASS"
        line = f"criterion {number}: {verdict}  {entry['title']}  ({entry['passed']} checks passed"
        if entry["failed"]:
            line += f", {len(entry['failed'])} failed: {', '.join(entry['failed'])}"
        terminalreporter.write_line(line + ")")
