import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

import pytest  # noqa: E402

_VERDICTS = []


@pytest.fixture
def verdict(request):
    """Record one acceptance criterion as a PASS/FAIL line and return its outcome."""
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    def record(number, ok, detail):
        line = f"CRITERION {number:2d} {'PASS' if ok else 'FAIL'}: {detail}"
        _VERDICTS.append((number, line))
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
