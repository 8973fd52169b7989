_CRITERIA = {}
_RESULTS = {}


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            _CRITERIA[item.nodeid] = marker.args


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.nodeid not in _CRITERIA:
        return
    # A criterion fails if any phase (setup, call, teardown) fails.
    if report.failed:
        _RESULTS[report.nodeid] = "FAIL"
    elif report.when == "call":
        _RESULTS.setdefault(report.nodeid, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (number, title) in sorted(_CRITERIA.items(), key=lambda kv: kv[1][0]):
        status = _RESULTS.get(nodeid, "NOT RUN")
        terminalreporter.write_line(f"AC{number:02d} {status:7s} {title}")
