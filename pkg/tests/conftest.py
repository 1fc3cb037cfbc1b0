import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def brute_force_states(alpha, n, periodic):
    """All legal bitmasks by checking every pair of up spins."""
    out = []
    for s in range(1 << n):
        ups = [j for j in range(n) if s >> j & 1]
        ok = True
        for a in ups:
            for b in ups:
                if a < b:
                    d = b - a
                    if periodic:
                        d = min(d, n - d)
                    if d <= alpha:
                        ok = False
        if ok:
            out.append(s)
    return np.array(out, dtype=np.int64)


def dense_pxp(alpha, n, periodic):
    """Hamiltonian built from the full 2^n spin matrices, then restricted to legal states."""
    states = brute_force_states(alpha, n, periodic)
    full = 1 << n
    legal = set(states.tolist())
    h = np.zeros((full, full))
    for s in range(full):
        for j in range(n):
            nbrs = []
            for d in range(1, alpha + 1):
                for k in (j - d, j + d):
                    if periodic:
                        nbrs.append(k % n)
                    elif 0 <= k < n:
                        nbrs.append(k)
            if any(s >> k & 1 for k in nbrs if k != j):
                continue
            h[s ^ (1 << j), s] = 1.0
    return h[np.ix_(states, states)], states, legal


# one verdict line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
