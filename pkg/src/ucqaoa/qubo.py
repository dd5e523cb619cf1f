"""Penalized unconstrained objective and its QUBO/Ising reductions.

The constrained problem is rewritten with three squared penalty families:
load balance, lower generation limit (slack s1), upper generation limit
(slack s2).  For a fixed continuous assignment (p, s1, s2) the objective
is quadratic in the binary ON/OFF variables (using y**2 == y), which
gives the QUBO whose diagonal cost table drives the QAOA circuit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SizeGuardError, ValidationError
from .instance import UcInstance, _check_lengths

DIAGONAL_GUARD = 20  # 2**20 float64 entries = 8 MB


@dataclass(frozen=True)
class PenaltyWeights:
    """Multipliers for the three squared penalty families (all >= 0)."""

    lambda1: float  # load balance
    lambda2: float  # lower generation limit
    lambda3: float  # upper generation limit

    def __post_init__(self) -> None:
        for name in ("lambda1", "lambda2", "lambda3"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValidationError(f"{name} must be finite and >= 0, got {v}")

    @classmethod
    def default_for(cls, inst: UcInstance) -> "PenaltyWeights":
        """Load-scaled default keeping penalty and cost terms commensurate:
        each weight is 10 * max fixed cost / L**2."""
        w = 10.0 * max(u.a for u in inst.units) / inst.load**2
        return cls(lambda1=w, lambda2=w, lambda3=w)


@dataclass(frozen=True, eq=False)
class ContinuousAssignment:
    """Fixed continuous part (p, s1, s2); all entries finite and >= 0."""

    p: np.ndarray
    s1: np.ndarray
    s2: np.ndarray

    def __post_init__(self) -> None:
        for name in ("p", "s1", "s2"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.ndim != 1:
                raise ValidationError(f"{name} must be a 1-D vector")
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                raise ValidationError(f"{name} entries must be finite and >= 0")
        if not (len(self.p) == len(self.s1) == len(self.s2)):
            raise ValidationError("p, s1, s2 must have equal lengths")


def optimal_slacks(inst: UcInstance, p: Sequence[float], commit: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Penalty-minimizing slacks for given powers and commitment:
    s1 = max(0, p - p_min*y), s2 = max(0, p_max*y - p)."""
    _, _, _, lo, hi = inst.coeff_arrays
    p = np.asarray(p, dtype=float)
    y = np.asarray(commit, dtype=float)
    return np.maximum(0.0, p - lo * y), np.maximum(0.0, hi * y - p)


def penalized_objective(
    inst: UcInstance,
    w: PenaltyWeights,
    commit: Sequence[int],
    ca: ContinuousAssignment,
) -> float:
    """Literal evaluation of the penalized objective.

    sum(a*y + b*p + c*p**2)
      + lambda1 * (sum(p*y) - L)**2
      + lambda2 * sum((p - s1 - p_min*y)**2)
      + lambda3 * sum((p + s2 - p_max*y)**2)

    Note b/c terms apply regardless of y, unlike the physical total_cost.
    """
    _check_lengths(inst, commit, ca.p)
    a, b, c, lo, hi = inst.coeff_arrays
    y = np.asarray(commit, dtype=float)
    p, s1, s2 = ca.p, ca.s1, ca.s2
    value = float(np.sum(a * y + b * p + c * p * p))
    value += w.lambda1 * float(np.sum(p * y) - inst.load) ** 2
    value += w.lambda2 * float(np.sum((p - s1 - lo * y) ** 2))
    value += w.lambda3 * float(np.sum((p + s2 - hi * y) ** 2))
    return value


@dataclass(frozen=True, eq=False)
class Qubo:
    """constant + sum(linear[i]*y[i]) + sum(quadratic[(i,j)]*y[i]*y[j]), i < j.

    y[i]**2 terms are folded into linear (y binary); the quadratic map
    holds no diagonal entries.
    """

    n: int
    constant: float
    linear: np.ndarray
    quadratic: dict[tuple[int, int], float]

    def value(self, commit: Sequence[int]) -> float:
        y = np.asarray(commit, dtype=float)
        v = self.constant + float(np.dot(self.linear, y))
        for (i, j), coeff in self.quadratic.items():
            v += coeff * y[i] * y[j]
        return v


@dataclass(frozen=True, eq=False)
class IsingModel:
    """offset + sum(h[i]*z[i]) + sum(j[(i,j)]*z[i]*z[j]) over z in {-1,+1}."""

    n: int
    offset: float
    h: np.ndarray
    j: dict[tuple[int, int], float]

    def value(self, z: Sequence[int]) -> float:
        zv = np.asarray(z, dtype=float)
        v = self.offset + float(np.dot(self.h, zv))
        for (i, jj), coeff in self.j.items():
            v += coeff * zv[i] * zv[jj]
        return v


def build_qubo(inst: UcInstance, w: PenaltyWeights, ca: ContinuousAssignment) -> Qubo:
    """Reduce the penalized objective at fixed (p, s1, s2) to a QUBO over y.

    Assembled by explicit expansion of each squared term (exact, testable
    against penalized_objective at every bitstring); the only pairwise
    coupling is 2*lambda1*p[i]*p[j] from the load penalty.
    """
    _check_lengths(inst, ca.p)
    a, b, c, lo, hi = inst.coeff_arrays
    n = inst.n
    p, s1, s2 = ca.p, ca.s1, ca.s2

    constant = float(np.sum(b * p + c * p * p))
    linear = a.copy()

    # lambda1 * (sum(p*y) - L)**2
    constant += w.lambda1 * inst.load**2
    linear += w.lambda1 * (p * p - 2.0 * inst.load * p)
    quadratic: dict[tuple[int, int], float] = {}
    if w.lambda1 != 0.0:
        for i in range(n):
            if p[i] == 0.0:
                continue
            for j in range(i + 1, n):
                coeff = 2.0 * w.lambda1 * p[i] * p[j]
                if coeff != 0.0:
                    quadratic[(i, j)] = coeff

    # lambda2 * sum((d - p_min*y)**2), d = p - s1
    d = p - s1
    constant += w.lambda2 * float(np.sum(d * d))
    linear += w.lambda2 * (lo * lo - 2.0 * d * lo)

    # lambda3 * sum((e - p_max*y)**2), e = p + s2
    e = p + s2
    constant += w.lambda3 * float(np.sum(e * e))
    linear += w.lambda3 * (hi * hi - 2.0 * e * hi)

    return Qubo(n=n, constant=constant, linear=linear, quadratic=quadratic)


def qubo_to_ising(q: Qubo) -> IsingModel:
    """Substitute y = (z + 1)/2; values agree exactly at corresponding points."""
    offset = q.constant + 0.5 * float(q.linear.sum())
    h = 0.5 * q.linear.copy()
    j: dict[tuple[int, int], float] = {}
    for (i, jj), coeff in q.quadratic.items():
        quarter = 0.25 * coeff
        offset += quarter
        h[i] += quarter
        h[jj] += quarter
        if quarter != 0.0:
            j[(i, jj)] = quarter
    return IsingModel(n=q.n, offset=offset, h=h, j=j)


def qubo_diagonal(q: Qubo, guard: int = DIAGONAL_GUARD) -> np.ndarray:
    """Cost table over all 2**n bitstrings; entry k is the QUBO value of the
    commitment whose unit-i bit is bit i of k (unit 0 = LSB)."""
    if q.n > guard:
        raise SizeGuardError(f"diagonal guard is n <= {guard}, got {q.n}")
    size = 1 << q.n
    k = np.arange(size, dtype=np.int64)
    diag = np.full(size, q.constant)
    bits = []
    for i in range(q.n):
        bit = ((k >> i) & 1).astype(float)
        bits.append(bit)
        if q.linear[i] != 0.0:
            diag += q.linear[i] * bit
    for (i, j), coeff in q.quadratic.items():
        diag += coeff * (bits[i] * bits[j])
    return diag
