"""Series evaluation and exact level-n base-b increments.

The level-n increment of f over cell k telescopes to a finite sum: the
series terms with resolution exponent >= n cancel by periodicity, so

    f((k+1) b**-n) - f(k b**-n)
        = b**-n * sgn(alpha)**n * sum_{m=1}^{n} sgn(alpha)**m * y_m(k)

in the critical case |alpha| = 1/b, where y_m(k) is the scaled base
increment at grid index k mod b**m.  The integer sum S_k (exact for the
tent base) is the quantity everything downstream accumulates; the b**-n
scale is applied once at output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numpy as np

from .base import MAX_CELLS, BaseKind, PeriodicBase, base_eval, scaled_increment, scaled_increment_block
from .errors import InvalidTolerance, ModeError, RangeError


class AlphaMode(Enum):
    CRITICAL = "critical"  # |alpha| = 1/b, represented symbolically
    GENERAL = "general"


@dataclass(frozen=True)
class FractalSpec:
    """The triple (base, b, alpha) defining f(t) = sum alpha**m phi(b**m t).

    In CRITICAL mode |alpha| = 1/b is exact by construction and
    ``magnitude`` must be None; in GENERAL mode ``magnitude`` = |alpha|.
    """

    base: PeriodicBase
    b: int
    alpha_sign: int = 1
    alpha_mode: AlphaMode = AlphaMode.CRITICAL
    magnitude: float | None = None

    def __post_init__(self) -> None:
        if self.b < 2:
            raise ValueError(f"need b >= 2, got {self.b}")
        if self.alpha_sign not in (1, -1):
            raise ValueError(f"alpha_sign must be +1 or -1, got {self.alpha_sign}")
        if self.alpha_mode is AlphaMode.CRITICAL:
            if self.magnitude is not None:
                raise ValueError("critical mode carries no explicit magnitude")
        else:
            if self.magnitude is None or not 0.0 < self.magnitude < 1.0:
                raise ValueError("general mode needs a magnitude in (0, 1)")

    @property
    def is_critical(self) -> bool:
        return self.alpha_mode is AlphaMode.CRITICAL

    @property
    def alpha(self) -> float:
        mag = 1.0 / self.b if self.is_critical else self.magnitude
        return self.alpha_sign * mag


def critical(base: PeriodicBase, b: int, sign: int = 1) -> FractalSpec:
    return FractalSpec(base, b, sign, AlphaMode.CRITICAL)


def general(base: PeriodicBase, b: int, alpha: float) -> FractalSpec:
    sign = 1 if alpha >= 0 else -1
    return FractalSpec(base, b, sign, AlphaMode.GENERAL, abs(alpha))


@dataclass(frozen=True)
class IncrementRecord:
    """One level-n cell increment in scaled form.

    ``s`` is the scaled sum S_k (an exact integer for the tent base in
    critical mode, a float for trig, None in general mode); ``value`` is
    the actual increment f((k+1) b**-n) - f(k b**-n).
    """

    k: int
    n: int
    s: int | float | None
    value: float


def cell_count(spec: FractalSpec, n: int) -> int:
    """b**n, with the 64-bit level cap enforced."""
    if n < 1:
        raise RangeError(f"need level n >= 1, got {n}")
    bn = spec.b**n
    if bn >= MAX_CELLS:
        raise OverflowError(f"b**n = {spec.b}**{n} exceeds the 64-bit level cap")
    return bn


def eval_f(spec: FractalSpec, t: float, tol: float = 1e-12) -> float:
    """Evaluate f(t) by truncating the series once the tail bound <= tol."""
    if tol <= 0.0:
        raise InvalidTolerance(f"tolerance must be positive, got {tol}")
    a = abs(spec.alpha)
    tail = spec.base.sup_bound / (1.0 - a)
    terms = 0
    while tail > tol:
        tail *= a
        terms += 1
    alpha = spec.alpha
    acc = 0.0
    for m in reversed(range(terms)):  # smallest terms first
        acc += alpha**m * base_eval(spec.base, (spec.b**m) * t)
    return acc


def _record(spec: FractalSpec, n: int, k: int, residues: list[int]) -> IncrementRecord:
    base, b, sgn = spec.base, spec.b, spec.alpha_sign
    if spec.is_critical:
        s = 0 if base.kind is BaseKind.TENT else 0.0
        sign_m = 1
        for m in range(1, n + 1):
            sign_m *= sgn
            s += sign_m * scaled_increment(base, b, m, residues[m - 1])
        value = (sgn**n) * s * float(b) ** (-n)
        return IncrementRecord(k=k, n=n, s=s, value=value)
    alpha = spec.alpha
    value = 0.0
    for m in range(n - 1, -1, -1):  # descending series order bounds rounding
        j = n - m
        value += alpha**m * float(b) ** (m - n) * scaled_increment(base, b, j, residues[j - 1])
    return IncrementRecord(k=k, n=n, s=None, value=value)


def increment_exact(spec: FractalSpec, n: int, k: int) -> IncrementRecord:
    """The exact level-n increment over cell k via the digit decomposition."""
    bn = cell_count(spec, n)
    if not 0 <= k < bn:
        raise RangeError(f"cell index k={k} outside [0, {bn})")
    residues = [k % spec.b**m for m in range(1, n + 1)]
    return _record(spec, n, k, residues)


def increment_stream(spec: FractalSpec, n: int, k_lo: int, k_hi: int) -> Iterator[IncrementRecord]:
    """Yield increment_exact(spec, n, k) for k in [k_lo, k_hi).

    The n residues k mod b**m are carried incrementally (one +1-with-wrap
    per resolution level and cell), so no divisions occur after seeding;
    outputs are bitwise identical to per-k increment_exact.
    """
    bn = cell_count(spec, n)
    if not 0 <= k_lo <= k_hi <= bn:
        raise RangeError(f"invalid cell range [{k_lo}, {k_hi}) at level {n}")
    powers = [spec.b**m for m in range(1, n + 1)]
    residues = [k_lo % p for p in powers]
    for k in range(k_lo, k_hi):
        yield _record(spec, n, k, residues)
        for i, p in enumerate(powers):
            residues[i] += 1
            if residues[i] == p:
                residues[i] = 0


def scaled_sum_block(spec: FractalSpec, n: int, k_lo: int, k_hi: int) -> np.ndarray:
    """Vectorized S_k for k in [k_lo, k_hi); critical mode only.

    Returns int64 for the tent base and float64 for trig.  Workers on
    disjoint ranges produce independent blocks; any reduction must combine
    blocks in ascending k order (or exactly) to stay deterministic.
    """
    if not spec.is_critical:
        raise ModeError("scaled sums are defined in critical mode only")
    bn = cell_count(spec, n)
    if not 0 <= k_lo <= k_hi <= bn:
        raise RangeError(f"invalid cell range [{k_lo}, {k_hi}) at level {n}")
    k = np.arange(k_lo, k_hi, dtype=np.int64)
    is_tent = spec.base.kind is BaseKind.TENT
    s = np.zeros(k.shape, dtype=np.int64 if is_tent else np.float64)
    sign_m = 1
    for m in range(1, n + 1):
        sign_m *= spec.alpha_sign
        r = k % (spec.b**m)
        y = scaled_increment_block(spec.base, spec.b, m, r)
        if sign_m == 1:
            s += y
        else:
            s -= y
    return s


def value_block(spec: FractalSpec, n: int, k_lo: int, k_hi: int) -> np.ndarray:
    """Vectorized increment values for k in [k_lo, k_hi), any alpha mode."""
    if spec.is_critical:
        s = scaled_sum_block(spec, n, k_lo, k_hi)
        return (spec.alpha_sign**n * float(spec.b) ** (-n)) * s
    bn = cell_count(spec, n)
    if not 0 <= k_lo <= k_hi <= bn:
        raise RangeError(f"invalid cell range [{k_lo}, {k_hi}) at level {n}")
    k = np.arange(k_lo, k_hi, dtype=np.int64)
    v = np.zeros(k.shape, dtype=np.float64)
    alpha = spec.alpha
    for m in range(n - 1, -1, -1):
        j = n - m
        r = k % (spec.b**j)
        v += (alpha**m * float(spec.b) ** (m - n)) * scaled_increment_block(spec.base, spec.b, j, r)
    return v
