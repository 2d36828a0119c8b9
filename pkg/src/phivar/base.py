"""Period-1 Lipschitz base functions and their exact scaled increments.

Two families are built in: the tent map (distance to the nearest integer)
and the trigonometric base nu*sin(2*pi*t) + rho*cos(2*pi*t).  Everything on
a base-b grid goes through :func:`scaled_increment`, which works on exact
integer grid indices; the tent increments are pure integer arithmetic and
the trigonometric increments use a cancellation-free difference identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BaseError

# b**m must stay inside 64-bit signed range; no big-integer fallback.
MAX_CELLS = 2**63

_TWO_PI = 2.0 * math.pi


class BaseKind(Enum):
    TENT = "tent"
    TRIG = "trig"


@dataclass(frozen=True)
class PeriodicBase:
    """A period-1 Lipschitz base function.

    For TRIG, ``nu`` and ``rho`` are the sine and cosine amplitudes; they
    are ignored for TENT.
    """

    kind: BaseKind
    nu: float = 0.0
    rho: float = 0.0

    def __post_init__(self) -> None:
        if self.kind is BaseKind.TRIG and self.nu == 0.0 and self.rho == 0.0:
            raise BaseError("trig base needs a nonzero amplitude")

    @property
    def amplitude(self) -> float:
        return math.hypot(self.nu, self.rho)

    @property
    def lipschitz_bound(self) -> float:
        if self.kind is BaseKind.TENT:
            return 1.0
        return _TWO_PI * self.amplitude

    @property
    def sup_bound(self) -> float:
        if self.kind is BaseKind.TENT:
            return 0.5
        return self.amplitude


def tent() -> PeriodicBase:
    return PeriodicBase(BaseKind.TENT)


def trig(nu: float, rho: float) -> PeriodicBase:
    return PeriodicBase(BaseKind.TRIG, float(nu), float(rho))


def base_eval(base: PeriodicBase, t: float) -> float:
    """Evaluate the base function at ``t`` (argument reduced mod 1)."""
    x = t - math.floor(t)
    if base.kind is BaseKind.TENT:
        return min(x, 1.0 - x)
    return base.nu * math.sin(_TWO_PI * x) + base.rho * math.cos(_TWO_PI * x)


def _check_grid(b: int, m: int, r) -> int:
    if b < 2:
        raise ValueError(f"need b >= 2, got {b}")
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    bm = b**m
    if bm >= MAX_CELLS:
        raise OverflowError(f"b**m = {b}**{m} exceeds the 64-bit level cap")
    return bm


def scaled_increment(base: PeriodicBase, b: int, m: int, r: int) -> float | int:
    """b**m * (phi((r+1)/b**m) - phi(r/b**m)) at the exact grid index r.

    Tent: exact integer in {-1, 0, +1} (0 only when b**m is odd).
    Trig: computed via phi(x+h)-phi(x) = 2 sin(pi h) (nu cos(2 pi x + pi h)
    - rho sin(2 pi x + pi h)), which avoids the catastrophic cancellation
    of subtracting two nearly equal values when h = b**-m is tiny.
    """
    bm = _check_grid(b, m, r)
    if not 0 <= r < bm:
        raise ValueError(f"grid index r={r} outside [0, {bm})")
    if base.kind is BaseKind.TENT:
        return min(r + 1, bm - r - 1) - min(r, bm - r)
    h = 1.0 / bm
    x = r / bm
    amp = bm * (2.0 * math.sin(math.pi * h))
    ang = _TWO_PI * x + math.pi * h
    return amp * (base.nu * math.cos(ang) - base.rho * math.sin(ang))


def scaled_increment_block(base: PeriodicBase, b: int, m: int, r: np.ndarray) -> np.ndarray:
    """Vectorized :func:`scaled_increment` over an int64 index array."""
    bm = _check_grid(b, m, 0)
    if base.kind is BaseKind.TENT:
        return np.minimum(r + 1, bm - r - 1) - np.minimum(r, bm - r)
    h = 1.0 / bm
    x = r / bm
    amp = bm * (2.0 * math.sin(math.pi * h))
    ang = _TWO_PI * x + math.pi * h
    return amp * (base.nu * np.cos(ang) - base.rho * np.sin(ang))


def trig_slope(base: PeriodicBase, x, h: float):
    """(phi(x+h) - phi(x)) / h for the trig base, stable down to h = 0.

    At h = 0 this is the derivative phi'(x) = 2 pi (nu cos(2 pi x)
    - rho sin(2 pi x)); h values that underflow to zero (large resolution
    exponents) land on that limit.  Accepts scalar or ndarray ``x``.
    """
    if base.kind is not BaseKind.TRIG:
        raise BaseError("trig_slope is only defined for the trig base")
    factor = _TWO_PI if h == 0.0 else 2.0 * math.sin(math.pi * h) / h
    ang = _TWO_PI * x + math.pi * h
    if isinstance(x, np.ndarray):
        return factor * (base.nu * np.cos(ang) - base.rho * np.sin(ang))
    return factor * (base.nu * math.cos(ang) - base.rho * math.sin(ang))
