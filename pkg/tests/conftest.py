import math

import pytest


def trial_division_is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def brute_collision(table):
    """max over pairs of equal-site counts, pure Python."""
    rows = [tuple(r) for r in table]
    best = 0
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            best = max(best, sum(a == b for a, b in zip(rows[i], rows[j])))
    return best


@pytest.fixture
def tmp_ids(tmp_path):
    def write(ids, name="ids.txt"):
        p = tmp_path / name
        p.write_text("".join(f"{x}\n" for x in ids))
        return p

    return write


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
