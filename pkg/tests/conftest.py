import pytest

_outcomes: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _outcomes.setdefault(number, {"title": title, "ok": True, "notes": []})
    failed = rep.failed or (rep.when == "call" and hasattr(rep, "wasxfail"))
    if failed:
        entry["ok"] = False
        reason = getattr(rep, "wasxfail", "") or item.name
        if reason not in entry["notes"]:
            entry["notes"].append(reason)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        e = _outcomes[number]
        line = f"{'PASS' if e['ok'] else 'FAIL'}  criterion {number:2d}: {e['title']}"
        if e["notes"]:
            line += "  [" + "; ".join(e["notes"]) + "]"
        terminalreporter.write_line(line)
