"""Ground-truth dispatch engine.

Solves the continuous dispatch induced by a fixed commitment (equal
marginal cost via bisection on the shared multiplier), exhaustively
enumerates all commitments, and builds the near-optimal commitment set
used by the convergence metrics.  A brute-force grid oracle validates
the bisection in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import InfeasibleError, SizeGuardError, ValidationError
from .instance import Commitment, UcInstance, _check_lengths, index_to_bits

ENUMERATION_GUARD = 24
BISECTION_MAX_ITER = 200
BISECTION_REL_TOL = 1e-6  # load residual target, relative to L

INFEASIBLE_COST = math.inf  # in-memory sentinel; never serialized as a float


@dataclass(frozen=True, eq=False)
class DispatchSolution:
    """Dispatch of one commitment: full-length power vector and total cost."""

    powers: np.ndarray
    cost: float
    feasible: bool


@dataclass(frozen=True, eq=False)
class NearOptimalSet:
    """Feasible commitments whose dispatch cost is within the cutoff."""

    members: frozenset[Commitment]
    optimal_cost: float
    cutoff: float
    n: int

    @cached_property
    def member_indices(self) -> np.ndarray:
        """Member basis-state indices (unit 0 = LSB), ascending."""
        idx = sorted(sum(b << i for i, b in enumerate(bits)) for bits in self.members)
        return np.array(idx, dtype=np.int64)


def dispatch_within_boxes(
    b: np.ndarray,
    c: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    load: float,
) -> Optional[np.ndarray]:
    """Minimize sum(b*p + c*p**2) s.t. sum(p) = load, lo <= p <= hi.

    Bisection on the shared marginal cost lambda with per-unit clipping
    p(lambda) = clamp((lambda - b)/(2c), lo, hi).  Units with c == 0 have a
    step supply at lambda == b; any leftover load among tied step units is
    filled lowest-index-first.  Returns None when the boxes cannot cover
    the load.
    """
    if lo.sum() > load or hi.sum() < load:
        return None
    c_pos = c > 0
    step = ~c_pos

    def powers_at(lam: float) -> np.ndarray:
        p = np.empty_like(b)
        if c_pos.any():
            p[c_pos] = np.clip((lam - b[c_pos]) / (2.0 * c[c_pos]), lo[c_pos], hi[c_pos])
        if step.any():
            p[step] = np.where(lam < b[step], lo[step], hi[step])
        return p

    lam_lo = float(b.min()) - 1.0
    lam_hi = float((b + 2.0 * c * hi).max()) + 1.0
    tol = BISECTION_REL_TOL * abs(load)
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lam_lo + lam_hi)
        p = powers_at(mid)
        resid = p.sum() - load
        if abs(resid) <= tol:
            return p
        if resid < 0:
            lam_lo = mid
        else:
            lam_hi = mid

    # Step units straddle the load: fill the gap lowest-index-first.
    p = powers_at(lam_lo)
    upper = powers_at(lam_hi)
    residual = load - p.sum()
    for i in range(len(p)):
        room = upper[i] - p[i]
        if room <= 0.0:
            continue
        take = min(room, residual)
        p[i] += take
        residual -= take
        if residual <= 0.0:
            break
    return p


def economic_dispatch(inst: UcInstance, commit: Sequence[int]) -> DispatchSolution:
    """Cheapest power assignment meeting the load with the given units ON.

    Infeasibility (ON units cannot cover the load) is a result, not an error.
    """
    _check_lengths(inst, commit)
    a, b, c, lo, hi = inst.coeff_arrays
    on = np.flatnonzero(np.asarray(commit, dtype=int))
    powers = np.zeros(inst.n)
    if on.size == 0:
        return DispatchSolution(powers=powers, cost=INFEASIBLE_COST, feasible=False)
    p_on = dispatch_within_boxes(b[on], c[on], lo[on], hi[on], inst.load)
    if p_on is None:
        return DispatchSolution(powers=powers, cost=INFEASIBLE_COST, feasible=False)
    powers[on] = p_on
    cost = float(np.sum(a[on] + b[on] * p_on + c[on] * p_on * p_on))
    return DispatchSolution(powers=powers, cost=cost, feasible=True)


# ---------------------------------------------------------------------------
# exhaustive grid oracle (tests only; independent of the bisection path)

_GRID_EPS = 1e-9


def _grid(lo: float, hi: float, resolution: float) -> np.ndarray:
    m = int(math.floor((hi - lo) / resolution + 1e-9))
    pts = lo + resolution * np.arange(m + 1)
    if pts[-1] < hi - _GRID_EPS:
        pts = np.append(pts, hi)
    return pts


def dispatch_grid_oracle(
    inst: UcInstance, commit: Sequence[int], resolution: float = 0.01
) -> DispatchSolution:
    """Exhaustive grid search over ON-unit powers summing to the load.

    Supports at most 3 ON units (the grid is exponential).  The last ON
    unit's power is eliminated by the load equality; boundary candidates
    where that unit's box binds are added so narrow feasible slivers are
    not missed.
    """
    _check_lengths(inst, commit)
    a, b, c, lo, hi = inst.coeff_arrays
    on = list(np.flatnonzero(np.asarray(commit, dtype=int)))
    if len(on) > 3:
        raise SizeGuardError(f"grid oracle supports at most 3 ON units, got {len(on)}")
    L = inst.load
    powers = np.zeros(inst.n)

    def result(p_on: Optional[np.ndarray]) -> DispatchSolution:
        if p_on is None:
            return DispatchSolution(powers=np.zeros(inst.n), cost=INFEASIBLE_COST, feasible=False)
        powers[on] = p_on
        cost = float(np.sum(a[on] + b[on] * p_on + c[on] * p_on * p_on))
        return DispatchSolution(powers=powers, cost=cost, feasible=True)

    if len(on) == 0:
        return result(None)

    if len(on) == 1:
        i = on[0]
        if lo[i] - _GRID_EPS <= L <= hi[i] + _GRID_EPS:
            return result(np.array([L]))
        return result(None)

    def last_axis_candidates(remaining: float, i: int, j: int) -> np.ndarray:
        """Grid over unit i plus the points where unit j's box would bind."""
        pts = _grid(lo[i], hi[i], resolution)
        extra = [remaining - hi[j], remaining - lo[j]]
        extra = [x for x in extra if lo[i] - _GRID_EPS <= x <= hi[i] + _GRID_EPS]
        if extra:
            pts = np.concatenate([pts, np.array(extra)])
        return pts

    if len(on) == 2:
        i, j = on
        p_i = last_axis_candidates(L, i, j)
        p_j = L - p_i
        ok = (p_j >= lo[j] - _GRID_EPS) & (p_j <= hi[j] + _GRID_EPS)
        if not ok.any():
            return result(None)
        p_i, p_j = p_i[ok], p_j[ok]
        costs = b[i] * p_i + c[i] * p_i**2 + b[j] * p_j + c[j] * p_j**2
        k = int(np.argmin(costs))
        return result(np.array([p_i[k], p_j[k]]))

    i, j, m = on
    best_cost = math.inf
    best = None
    for p_i in _grid(lo[i], hi[i], resolution):
        rem = L - p_i
        p_j = last_axis_candidates(rem, j, m)
        p_m = rem - p_j
        ok = (p_m >= lo[m] - _GRID_EPS) & (p_m <= hi[m] + _GRID_EPS)
        if not ok.any():
            continue
        p_j, p_m = p_j[ok], p_m[ok]
        costs = (
            b[i] * p_i + c[i] * p_i**2
            + b[j] * p_j + c[j] * p_j**2
            + b[m] * p_m + c[m] * p_m**2
        )
        k = int(np.argmin(costs))
        if costs[k] < best_cost:
            best_cost = float(costs[k])
            best = np.array([p_i, p_j[k], p_m[k]])
    return result(best)


# ---------------------------------------------------------------------------
# brute-force enumeration

_CHUNK_ROWS = 1 << 15


def _dispatch_chunk_vectorized(
    inst: UcInstance, start: int, stop: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Bisection dispatch for commitments [start, stop); requires all c > 0."""
    a, b, c, lo, hi = inst.coeff_arrays
    n = inst.n
    L = inst.load
    idx = np.arange(start, stop, dtype=np.int64)
    mask = ((idx[:, None] >> np.arange(n)) & 1).astype(bool)
    lo_m = np.where(mask, lo, 0.0)
    hi_m = np.where(mask, hi, 0.0)
    feas = mask.any(axis=1) & (lo_m.sum(axis=1) <= L) & (hi_m.sum(axis=1) >= L)

    # per-row brackets over the ON subset, matching the scalar path exactly
    lam_lo = np.where(mask, b, np.inf).min(axis=1) - 1.0
    lam_hi = np.where(mask, b + 2.0 * c * hi, -np.inf).max(axis=1) + 1.0
    lam_lo = np.where(feas, lam_lo, 0.0)
    lam_hi = np.where(feas, lam_hi, 0.0)
    tol = BISECTION_REL_TOL * L

    def powers_at(lam: np.ndarray) -> np.ndarray:
        p = np.clip((lam[:, None] - b) / (2.0 * c), lo, hi)
        return np.where(mask, p, 0.0)

    done = ~feas
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lam_lo + lam_hi)
        p = powers_at(mid)
        resid = p.sum(axis=1) - L
        done = done | (np.abs(resid) <= tol)
        if done.all():
            break
        move = ~done
        low = resid < 0
        lam_lo = np.where(move & low, mid, lam_lo)
        lam_hi = np.where(move & ~low, mid, lam_hi)
    p = powers_at(0.5 * (lam_lo + lam_hi))
    costs = np.where(mask, a + b * p + c * p * p, 0.0).sum(axis=1)
    costs = np.where(feas, costs, np.inf)
    p[~feas] = 0.0
    return p, costs, feas


def enumerate_all(inst: UcInstance) -> list[tuple[Commitment, DispatchSolution]]:
    """Dispatch all 2**N commitments, ranked ascending by cost.

    Infeasible commitments sort last; ties break by ascending commitment
    index.  Memory grows as 2**N; guarded at N <= 24 (practical use is
    N <= ~16).
    """
    n = inst.n
    if n > ENUMERATION_GUARD:
        raise SizeGuardError(f"enumeration guard is N <= {ENUMERATION_GUARD}, got {n}")
    size = 1 << n
    _, _, c, _, _ = inst.coeff_arrays
    powers = np.zeros((size, n))
    costs = np.full(size, np.inf)
    feas = np.zeros(size, dtype=bool)
    if np.all(c > 0):
        for start in range(0, size, _CHUNK_ROWS):
            stop = min(start + _CHUNK_ROWS, size)
            powers[start:stop], costs[start:stop], feas[start:stop] = (
                _dispatch_chunk_vectorized(inst, start, stop)
            )
    else:
        for k in range(size):
            sol = economic_dispatch(inst, index_to_bits(k, n))
            powers[k] = sol.powers
            feas[k] = sol.feasible
            if sol.feasible:
                costs[k] = sol.cost
    order = np.lexsort((np.arange(size), costs))
    entries = []
    for k in order:
        k = int(k)
        sol = DispatchSolution(
            powers=powers[k].copy(),
            cost=float(costs[k]) if feas[k] else INFEASIBLE_COST,
            feasible=bool(feas[k]),
        )
        entries.append((index_to_bits(k, n), sol))
    return entries


def near_optimal_set(inst: UcInstance, fraction: float = 0.05) -> NearOptimalSet:
    """All feasible commitments with cost <= (1 + fraction) * optimal cost."""
    if fraction < 0:
        raise ValidationError(f"fraction must be >= 0, got {fraction}")
    entries = enumerate_all(inst)
    if not entries[0][1].feasible:
        raise InfeasibleError(f"instance {inst.name!r} has no feasible commitment")
    optimal = entries[0][1].cost
    cutoff = (1.0 + fraction) * optimal
    members = frozenset(
        bits for bits, sol in entries if sol.feasible and sol.cost <= cutoff
    )
    return NearOptimalSet(members=members, optimal_cost=optimal, cutoff=cutoff, n=inst.n)
