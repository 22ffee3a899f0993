"""Fairness and efficiency diagnostics of located solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from fairmclp.fairness import FairnessSpec
from fairmclp.instance import Instance
from fairmclp.solver import CoverageSolution, SolveOptions, Status, solve

BASELINE_TOL = 1e-9


class BaselineError(ValueError):
    """A baseline is inconsistent with the solution it is compared against."""


def envy(Wj: float, Wk: float) -> float:
    """Envy felt by a facility covering ``Wj`` towards one covering ``Wk``."""
    return max(0.0, Wk - Wj)


def gini_index(W: Sequence[float]) -> float | None:
    """Total pairwise envy over ``2 p sum(W)``; ``None`` when nothing is covered."""
    W = [float(x) for x in W]
    total = math.fsum(W)
    if total <= 0:
        return None
    p = len(W)
    return math.fsum(envy(a, b) for a in W for b in W) / (2 * p * total)


def relative_loss(baseline: float, value: float) -> float | None:
    """``(baseline - value) / baseline``; ``None`` for a zero baseline."""
    if baseline == 0:
        return None
    if value > baseline * (1 + BASELINE_TOL):
        raise BaselineError(f"value {value!r} exceeds its optimal baseline {baseline!r}")
    loss = (baseline - value) / baseline
    return min(1.0, max(0.0, loss))


def price_of_fairness(sol: CoverageSolution | Sequence[float], sum_baseline: float) -> float | None:
    """Relative loss of total coverage against the classical maximal-coverage optimum."""
    W = sol.W if isinstance(sol, CoverageSolution) else sol
    return relative_loss(sum_baseline, math.fsum(W))


def price_of_efficiency(sol: CoverageSolution | Sequence[float], min_baseline: float) -> float | None:
    """Relative loss of the smallest facility coverage against the max-min optimum."""
    W = sol.W if isinstance(sol, CoverageSolution) else sol
    return relative_loss(min_baseline, min(W))


@dataclass(frozen=True)
class Baselines:
    """Optimal reference values on one (instance, p, R, space) combination."""

    sum_baseline: float
    min_baseline: float
    instance_key: str
    p: int
    R: float
    space: str

    @classmethod
    def from_solutions(cls, sum_solution: CoverageSolution, min_solution: CoverageSolution) -> "Baselines":
        for sol, fam in ((sum_solution, "W"), (min_solution, "C")):
            if sol.spec.family != fam or sol.spec.alpha != 0:
                raise BaselineError(f"baseline must come from family {fam} with alpha = 0")
            if sol.status not in (Status.OPTIMAL, Status.DEGENERATE):
                raise BaselineError("baselines must be solved to optimality")
        if (sum_solution.instance_key, sum_solution.p, sum_solution.R, sum_solution.space) != (
                min_solution.instance_key, min_solution.p, min_solution.R, min_solution.space):
            raise BaselineError("baselines come from different problems")
        return cls(sum_solution.total, min(min_solution.W), sum_solution.instance_key,
                   sum_solution.p, sum_solution.R, sum_solution.space)

    @classmethod
    def compute(cls, instance: Instance, p: int, R: float, space: str = "disc",
                opts: SolveOptions | None = None) -> "Baselines":
        """Solve both reference problems exactly."""
        opts = opts or SolveOptions(mode="bb" if space == "disc" else "fds")
        s = solve(instance, FairnessSpec.of("W", p, 0), p, R, space, opts)
        m = solve(instance, FairnessSpec.of("C", p, 0), p, R, space, opts)
        return cls.from_solutions(s, m)


@dataclass(frozen=True)
class MetricsReport:
    pof: float | None
    poe: float | None
    gini: float | None
    coverage_pct: float
    W: tuple[float, ...]
    status: str
    sum_baseline: float
    min_baseline: float

    def to_json(self) -> dict:
        return {
            "PoF": self.pof,
            "PoE": self.poe,
            "Gini": self.gini,
            "coverage_pct": self.coverage_pct,
            "W": list(self.W),
            "status": self.status,
            "baselines": {"sum_baseline": self.sum_baseline, "min_baseline": self.min_baseline},
        }


def coverage_percentage(W: Sequence[float], instance: Instance) -> float:
    total = math.fsum(instance.weights)
    return 0.0 if total == 0 else 100.0 * math.fsum(W) / total


def report(sol: CoverageSolution, instance: Instance, baselines: Baselines) -> MetricsReport:
    key = (sol.instance_key, sol.p, sol.R, sol.space)
    if key != (baselines.instance_key, baselines.p, baselines.R, baselines.space):
        raise BaselineError("solution and baselines refer to different problems")
    if sol.instance_key != instance.digest():
        raise BaselineError("solution was computed on a different instance")
    return MetricsReport(
        pof=price_of_fairness(sol, baselines.sum_baseline),
        poe=price_of_efficiency(sol, baselines.min_baseline),
        gini=gini_index(sol.W),
        coverage_pct=coverage_percentage(sol.W, instance),
        W=tuple(sol.W),
        status=sol.status.value,
        sum_baseline=baselines.sum_baseline,
        min_baseline=baselines.min_baseline,
    )
