import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(20240611)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


class Criterion:
    """Collects the checks of one acceptance criterion and reports a single line."""

    def __init__(self, config, number, title, budget):
        import time
        self.config, self.number, self.title, self.budget = config, number, title, budget
        self.failures = []
        self.notes = []
        self._clock = time.perf_counter
        self.start = self._clock()

    def check(self, label, ok, detail=""):
        if not ok:
            self.failures.append(f"{label} {detail}".strip())
        return ok

    def note(self, text):
        self.notes.append(text)

    def finish(self):
        elapsed = self._clock() - self.start
        self.check("runtime", elapsed < self.budget, f"{elapsed:.1f}s >= {self.budget}s")
        verdict = "PASS" if not self.failures else "FAIL"
        line = (f"criterion {self.number} ({self.title}): {verdict} "
                f"[{elapsed:.1f}s of {self.budget}s]")
        if self.notes:
            line += " " + "; ".join(self.notes)
        if self.failures:
            line += " | failed: " + "; ".join(self.failures)
        self.config.stash.setdefault(_ACCEPTANCE_KEY, []).append((self.number, line))
        reporter = self.config.pluginmanager.get_plugin("terminalreporter")
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(line)
        assert not self.failures, line


@pytest.fixture
def criterion(request):
    def make(number, title, budget):
        return Criterion(request.config, number, title, budget)
    return make


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
