"""Closed-form limits and roughness classification constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .base import BaseKind
from .engine import FractalSpec
from .errors import ModeError, RangeError, UnsupportedBase


class FormulaId(Enum):
    TAKAGI_EVEN = "takagi_even"
    TAKAGI_ODD = "takagi_odd"
    WEIERSTRASS = "weierstrass"
    CLT_GENERIC = "clt_generic"


@dataclass(frozen=True)
class LimitResult:
    value: float
    formula_id: FormulaId
    sigma2: float  # the CLT variance behind the constant


def clt_constant(sigma2: float, b: int) -> float:
    """sqrt(2 sigma^2 / (pi ln b)); natural log throughout the project."""
    if sigma2 <= 0.0:
        raise RangeError(f"need sigma2 > 0, got {sigma2}")
    if b < 2:
        raise RangeError(f"need b >= 2, got {b}")
    return math.sqrt(2.0 * sigma2 / (math.pi * math.log(b)))


def phi_limit(spec: FractalSpec, t: float = 1.0) -> LimitResult:
    """The Phi-variation limit over [0, t] for the built-in critical families."""
    if not spec.is_critical:
        raise ModeError("closed-form limits exist only at critical roughness")
    if not 0.0 <= t <= 1.0:
        raise RangeError(f"need t in [0, 1], got {t}")
    b = spec.b
    if spec.base.kind is BaseKind.TENT:
        if b % 2 == 0:
            sigma2 = 1.0
            fid = FormulaId.TAKAGI_EVEN
        else:
            s = spec.alpha_sign
            sigma2 = (b + s) / (b - s)
            fid = FormulaId.TAKAGI_ODD
    elif spec.base.kind is BaseKind.TRIG:
        sigma2 = 2.0 * math.pi**2 * (spec.base.nu**2 + spec.base.rho**2)
        fid = FormulaId.WEIERSTRASS
    else:  # pragma: no cover - only two kinds exist today
        raise UnsupportedBase(f"no closed-form limit for base kind {spec.base.kind}")
    return LimitResult(value=t * clt_constant(sigma2, b), formula_id=fid, sigma2=sigma2)


@dataclass(frozen=True)
class RoughnessClass:
    """Classification of the power-variation behaviour of a spec.

    kind is one of 'bounded_variation', 'critical', 'rough'; p is the
    variation index -ln b / ln |alpha| where defined (p = 1 at critical).
    """

    kind: str
    p: float | None
    note: str = ""

    def q_class(self, q: float) -> str:
        """'zero' | 'finite' | 'infinite' for the q-th power variation."""
        if q <= 0.0:
            raise RangeError(f"need q > 0, got {q}")
        if self.kind == "bounded_variation":
            return "zero" if q > 1.0 else ("finite" if q == 1.0 else "infinite")
        if self.kind == "critical":
            # power variation vanishes above 1 and blows up at or below 1;
            # the Phi gauge is the right measuring stick here
            return "zero" if q > 1.0 else "infinite"
        if q > self.p:
            return "zero"
        return "finite" if q == self.p else "infinite"


def variation_index(spec: FractalSpec) -> RoughnessClass:
    if spec.is_critical:
        return RoughnessClass(
            kind="critical",
            p=1.0,
            note="q-variation vanishes for q > 1; use the Phi gauge",
        )
    a = spec.magnitude
    scaled = a * spec.b
    if scaled < 1.0:
        return RoughnessClass(kind="bounded_variation", p=None)
    if scaled == 1.0:
        return RoughnessClass(
            kind="critical",
            p=1.0,
            note="magnitude equals 1/b; prefer the exact critical mode",
        )
    return RoughnessClass(kind="rough", p=-math.log(spec.b) / math.log(a))
