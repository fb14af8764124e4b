import pytest

from l1cert.pointset import GraphParams, build_graph, point_set


@pytest.fixture(scope="session")
def pointsets():
    """Session cache of built point sets keyed by (k, n)."""
    cache = {}

    def get(k, n):
        if (k, n) not in cache:
            cache[(k, n)] = point_set(build_graph(GraphParams(k, n)))
        return cache[(k, n)]

    return get


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one pass/fail line per acceptance criterion."""
    rows = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" in nodeid and "test_criterion" in nodeid:
                name = nodeid.split("::")[-1]
                verdict = "PASS" if status == "passed" else "FAIL"
                rows.setdefault(name, verdict)
    if rows:
        terminalreporter.section("acceptance criteria")
        for name in sorted(rows):
            terminalreporter.write_line(f"{rows[name]} {name}")
