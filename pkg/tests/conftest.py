from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_criteria: dict[str, tuple[int, str]] = {}
_outcomes: dict[int, bool] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _criteria[item.nodeid] = (mark.args[0], mark.args[1])


def pytest_runtest_logreport(report):
    entry = _criteria.get(report.nodeid)
    if entry is None:
        return
    number = entry[0]
    if report.failed:
        _outcomes[number] = False
    elif report.when == "call":
        _outcomes.setdefault(number, True)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    titles = {n: t for n, t in _criteria.values()}
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        verdict = "PASS" if _outcomes[number] else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {verdict}  {titles[number]}")
