"""Phi-variation and power variation of fractal functions along base-b partitions."""

from .base import BaseKind, PeriodicBase, base_eval, scaled_increment, tent, trig
from .engine import (
    AlphaMode,
    FractalSpec,
    IncrementRecord,
    critical,
    eval_f,
    general,
    increment_exact,
    increment_stream,
)
from .theory import LimitResult, clt_constant, phi_limit, variation_index
from .variation import VariationReport, convergence_report, phi, phi_variation, q_variation

__all__ = [
    "AlphaMode",
    "BaseKind",
    "FractalSpec",
    "IncrementRecord",
    "LimitResult",
    "PeriodicBase",
    "VariationReport",
    "base_eval",
    "clt_constant",
    "convergence_report",
    "critical",
    "eval_f",
    "general",
    "increment_exact",
    "increment_stream",
    "phi",
    "phi_limit",
    "phi_variation",
    "q_variation",
    "scaled_increment",
    "tent",
    "trig",
    "variation_index",
]

__version__ = "0.1.0"
