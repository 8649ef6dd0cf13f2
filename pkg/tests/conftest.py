import pytest
from hypothesis import HealthCheck, settings


settings.register_profile("lcflow", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lcflow")


@pytest.fixture
def two_path():
    from lcflow.instances import two_path_graph
    return two_path_graph()


@pytest.fixture
def cost_split():
    from lcflow.instances import cost_split_graph
    return cost_split_graph()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[number])
