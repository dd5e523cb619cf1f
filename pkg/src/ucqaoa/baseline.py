"""Classical reference solver: branch-and-bound over commitments.

Exact and gap-tolerance approximate solving of the mixed-binary UC
program.  Nodes fix a subset of units ON or OFF; the bound relaxes every
undecided unit to a free [0, p_max] generator with no startup cost, which
never overestimates any completion.  Also hosts the random-instance
generator and the runtime-scaling benchmark behind `bench-classical`.
"""

from __future__ import annotations

import heapq
import itertools
import math
import statistics
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dispatch import DispatchSolution, dispatch_within_boxes, economic_dispatch
from .errors import InfeasibleError, SizeGuardError, ValidationError
from .instance import Commitment, UcInstance, UnitSpec

BNB_GUARD = 40

ON = 1
OFF = 0
UNDECIDED = -1


@dataclass(frozen=True)
class BnbNode:
    """Partial commitment: per-unit ON / OFF / UNDECIDED plus its bound."""

    fixed: tuple[int, ...]
    lower_bound: float


@dataclass(frozen=True, eq=False)
class SolveReport:
    commitment: Commitment
    dispatch: DispatchSolution
    proven_gap: float
    nodes_expanded: int
    wall_time_s: float


def node_lower_bound(inst: UcInstance, fixed: Sequence[int]) -> float:
    """Admissible bound: startup costs of fixed-ON units plus the cost of a
    relaxed dispatch where undecided units may generate anywhere in
    [0, p_max] for free.  Infinite when no completion can cover the load.

    A fully fixed node has no relaxation left, so it delegates to the
    economic dispatch of its commitment (same value, one bisection)."""
    _, b, c, lo, hi = _bound_arrays(inst, fixed)
    a = inst.coeff_arrays[0]
    states = np.asarray(fixed)
    if not np.any(states == UNDECIDED):
        sol = _leaf_solution(inst, fixed)
        return sol.cost if sol.feasible else math.inf
    fixed_cost = float(a[states == ON].sum())
    powers = dispatch_within_boxes(b, c, lo, hi, inst.load)
    if powers is None:
        return math.inf
    variable = float(np.sum(b * powers + c * powers * powers))
    return fixed_cost + variable


def _bound_arrays(inst: UcInstance, fixed: Sequence[int]):
    states = np.asarray(fixed)
    if states.size != inst.n:
        raise ValidationError(f"partial assignment has {states.size} entries, expected {inst.n}")
    a, b, c, lo, hi = inst.coeff_arrays
    box_lo = np.where(states == ON, lo, 0.0)
    box_hi = np.where(states == OFF, 0.0, hi)
    return a, b, c, box_lo, box_hi


def _leaf_solution(inst: UcInstance, fixed: Sequence[int]) -> DispatchSolution:
    return economic_dispatch(inst, tuple(int(s == ON) for s in fixed))


def solve_approx(inst: UcInstance, gap: float) -> SolveReport:
    """Best-first branch and bound, stopping once the incumbent is provably
    within `gap` of the optimum: incumbent <= (1 + gap) * lower bound."""
    if gap < 0:
        raise ValidationError(f"gap must be >= 0, got {gap}")
    if inst.n > BNB_GUARD:
        raise SizeGuardError(f"instance has {inst.n} units, solver guard is {BNB_GUARD}")

    start = time.perf_counter()
    hi = inst.coeff_arrays[4]

    incumbent_cost = math.inf
    incumbent: Optional[Commitment] = None
    incumbent_dispatch: Optional[DispatchSolution] = None

    all_on = (ON,) * inst.n
    sol = _leaf_solution(inst, all_on)
    if sol.feasible:
        incumbent_cost = sol.cost
        incumbent = tuple(1 for _ in range(inst.n))
        incumbent_dispatch = sol

    root = (UNDECIDED,) * inst.n
    counter = itertools.count()
    heap = [(node_lower_bound(inst, root), next(counter), root)]
    nodes_expanded = 0
    final_lb = math.inf

    while heap:
        bound, _, fixed = heapq.heappop(heap)
        final_lb = bound
        if incumbent_cost <= (1.0 + gap) * bound:
            break
        nodes_expanded += 1
        undecided = [i for i, s in enumerate(fixed) if s == UNDECIDED]
        if not undecided:
            sol = _leaf_solution(inst, fixed)
            if sol.feasible and sol.cost < incumbent_cost:
                incumbent_cost = sol.cost
                incumbent = tuple(int(s == ON) for s in fixed)
                incumbent_dispatch = sol
            continue
        branch = max(undecided, key=lambda i: (hi[i], -i))
        for state in (ON, OFF):
            child = fixed[:branch] + (state,) + fixed[branch + 1 :]
            child_bound = node_lower_bound(inst, child)
            if incumbent_cost <= (1.0 + gap) * child_bound:
                continue
            heapq.heappush(heap, (max(child_bound, bound), next(counter), child))
    else:
        final_lb = incumbent_cost  # tree exhausted: the incumbent is optimal

    if incumbent is None:
        raise InfeasibleError(
            f"no feasible commitment covers load {inst.load} "
            f"(total capacity {float(hi.sum())})"
        )
    if incumbent_cost == 0.0:
        proven_gap = 0.0
    else:
        proven_gap = max(0.0, (incumbent_cost - final_lb) / incumbent_cost)
    return SolveReport(
        commitment=incumbent,
        dispatch=incumbent_dispatch,
        proven_gap=proven_gap,
        nodes_expanded=nodes_expanded,
        wall_time_s=time.perf_counter() - start,
    )


def solve_exact(inst: UcInstance) -> SolveReport:
    """Branch and bound run to a proven gap of zero."""
    return solve_approx(inst, 0.0)


def random_instance(n: int, rng=None) -> UcInstance:
    """Scaling-benchmark generator; ranges bracket the builtin 10-unit data.

    p_max ~ U[50, 500], p_min = U[0.1, 0.4] * p_max, a ~ U[300, 1100],
    b ~ U[15, 30], c ~ U[3e-4, 8e-3], load = half of total capacity.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    p_max = rng.uniform(50.0, 500.0, n)
    p_min = rng.uniform(0.1, 0.4, n) * p_max
    a = rng.uniform(300.0, 1100.0, n)
    b = rng.uniform(15.0, 30.0, n)
    c = rng.uniform(3e-4, 8e-3, n)
    units = tuple(
        UnitSpec(p_min=float(p_min[i]), p_max=float(p_max[i]),
                 a=float(a[i]), b=float(b[i]), c=float(c[i]))
        for i in range(n)
    )
    return UcInstance(units=units, load=0.5 * float(p_max.sum()), name=f"random-{n}")


def scaling_benchmark(
    sizes: Sequence[int],
    trials: int = 5,
    gap: float = 0.08,
    seed: int = 0,
    measure_time: bool = True,
) -> list[tuple[int, str, float, float]]:
    """Rows of (n, mode, median_ms, cost) for exact and approximate modes.

    One shared instance stream per size keeps exact/approx comparisons
    paired.  `measure_time=False` writes 0.0 for every timing so the CSV
    is reproducible byte for byte.
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    rows: list[tuple[int, str, float, float]] = []
    for n in sizes:
        instances = [random_instance(n, rng) for _ in range(trials)]
        for mode in ("exact", "approx"):
            times_ms: list[float] = []
            costs: list[float] = []
            for inst in instances:
                t0 = time.perf_counter()
                report = solve_exact(inst) if mode == "exact" else solve_approx(inst, gap)
                times_ms.append((time.perf_counter() - t0) * 1e3)
                costs.append(report.dispatch.cost)
            median_ms = statistics.median(times_ms) if measure_time else 0.0
            rows.append((n, mode, median_ms, statistics.median(costs)))
    return rows
