import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

import pytest

# acceptance outcomes, printed once at the end of the session
_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        ok, detail = results[key]
        terminalreporter.write_line(f"criterion {key:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
