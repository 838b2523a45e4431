"""Acceptance criteria, one pytest case per criterion.

Every check line is printed in the terminal summary. Lines with a recorded
known failure are asserted separately under a strict xfail, so they turn the
run red if they start passing.
"""

import functools

import pytest

from weakpaths.harness.experiments import CRITERIA

LINES = []

KNOWN_FAILURES = {
    "contact": (3, "20% jump with contact",
                "first-order Rusanov smears the contact like dx^(1/2), so the "
                "frame distance decreases by about 1.42 per doubling, below 1.5"),
    "alpha-1.6": (11, "alpha = 1.6",
                  "rho e^(-z) is convex only where z > (alpha-1)/alpha; some "
                  "sampled states violate this for alpha = 1.6"),
    "alpha-1.8": (11, "alpha = 1.8",
                  "rho e^(-z) is convex only where z > (alpha-1)/alpha; more "
                  "sampled states violate this for alpha = 1.8"),
}


@functools.lru_cache(maxsize=None)
def run_criterion(n):
    lines = CRITERIA[n]()
    LINES.extend(line.line() for line in lines)
    return tuple(lines)


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    lines = run_criterion(n)
    assert lines
    for line in lines:
        print(line.line())
    failed = [l.line() for l in lines if l.known_failure is None and not l.passed]
    assert not failed, "\n".join(failed)


@pytest.mark.parametrize("key", [
    pytest.param(key, marks=pytest.mark.xfail(strict=True, reason=reason))
    for key, (_, _, reason) in sorted(KNOWN_FAILURES.items())])
def test_known_failure(key):
    n, fragment, _ = KNOWN_FAILURES[key]
    [line] = [l for l in run_criterion(n) if fragment in l.name]
    assert line.known_failure is not None
    assert line.passed, line.line()


if __name__ == "__main__":
    for n in sorted(CRITERIA):
        for line in run_criterion(n):
            print(line.line())
