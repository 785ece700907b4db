import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
                          derandomize=True)
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    import _report
    if _report.LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(_report.LINES, key=lambda s: int(s.split(".")[0].split()[-1])):
            terminalreporter.write_line(line)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: desk-scale acceptance criteria (slow)")
