"""The nine univariate benchmark problems and their rescaled evaluation.

Classic test functions from the infinity77 global-optimization collection,
kept on their original domains; the optimizer always works on [0, 1] via
rescaled_eval. Several are deliberately hard for a misspecified GP: clusters
of near-optimal local minima (03, 05, 22) or a needle-like global basin in
an otherwise flat landscape (06, 14).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

SELF_CHECK_TOL = 1e-3


@dataclass(frozen=True)
class TestProblem:
    name: str
    formula: Callable[[float], float]
    domain: tuple[float, float]
    known_minimizer: float
    known_minimum: float

    def self_check(self) -> float:
        """Absolute error of the formula at the reference minimizer."""
        return abs(self.formula(self.known_minimizer) - self.known_minimum)


def _f02(x: float) -> float:
    return math.sin(x) + math.sin(10.0 / 3.0 * x)


def _f03(x: float) -> float:
    return -sum(i * math.sin((i + 1) * x + i) for i in range(6))


def _f05(x: float) -> float:
    return -(1.4 - 3.0 * x) * math.sin(18.0 * x)


def _f06(x: float) -> float:
    return -(x + math.sin(x)) * math.exp(-x * x)


def _f07(x: float) -> float:
    return math.sin(x) + math.sin(10.0 / 3.0 * x) + math.log(x) - 0.84 * x + 3.0


def _f11(x: float) -> float:
    return 2.0 * math.cos(x) + math.cos(2.0 * x)


def _f14(x: float) -> float:
    return -math.exp(-x) * math.sin(2.0 * math.pi * x)


def _f15(x: float) -> float:
    return (x * x - 5.0 * x + 6.0) / (x * x + 1.0)


def _f22(x: float) -> float:
    return math.exp(-3.0 * x) - math.sin(x) ** 3


def problem_suite() -> list[TestProblem]:
    """All nine problems with domains and reference solutions."""
    return [
        TestProblem("problem02", _f02, (2.7, 7.5), 5.1457, -1.8996),
        TestProblem("problem03", _f03, (-10.0, 10.0), -6.7746, -12.0312),
        TestProblem("problem05", _f05, (0.0, 1.2), 0.9661, -1.4891),
        TestProblem("problem06", _f06, (-10.0, 10.0), 0.6796, -0.8242),
        TestProblem("problem07", _f07, (2.7, 7.5), 5.1998, -1.6013),
        # The reference minimizer is the exact stationary point 2*pi/3; the
        # commonly printed 2.0667 misses the minimum value by more than 1e-3.
        TestProblem("problem11", _f11, (-math.pi / 2.0, 2.0 * math.pi),
                    2.0 * math.pi / 3.0, -1.5),
        TestProblem("problem14", _f14, (0.0, 4.0), 0.2249, -0.7887),
        TestProblem("problem15", _f15, (-5.0, 5.0), 2.4142, -0.0355),
        TestProblem("problem22", _f22, (0.0, 20.0), 9.0 * math.pi / 2.0,
                    math.exp(-27.0 * math.pi / 2.0) - 1.0),
    ]


def get_problem(name: str) -> TestProblem:
    """Look up a problem by name or by bare number ('02' or 'problem02')."""
    key = name.strip().lower()
    if not key.startswith("problem"):
        key = "problem" + key.zfill(2)
    for problem in problem_suite():
        if problem.name == key:
            return problem
    raise KeyError(f"unknown problem: {name!r}")


def rescaled_eval(p: TestProblem, u: float) -> float:
    """Evaluate the problem at the unit-interval coordinate u."""
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"rescaled coordinate must lie in [0, 1], got {u!r}")
    a, b = p.domain
    return p.formula(a + u * (b - a))


def verify_suite() -> None:
    """Check every reference minimum is reproduced by its formula.

    Raises AssertionError listing the offending problems; run at harness
    startup so a transcription error cannot silently skew a campaign.
    """
    bad = [
        f"{p.name}: |f(x*) - f*| = {p.self_check():.2e}"
        for p in problem_suite()
        if p.self_check() > SELF_CHECK_TOL
    ]
    if bad:
        raise AssertionError("problem self-check failed: " + "; ".join(bad))
