"""Phi-variation and power-variation sums over base-b partition levels.

All accumulation is done in scaled, cancellation-free form: the integer
(or real) sums S_k from the engine are aggregated first and the b**-n
scale enters exactly once.  For the tent base the |S_k| population is a
small-integer histogram, so the partition sum is exact and trivially
independent of chunking; for the trig base the per-cell terms go through
math.fsum, which is exactly rounded and therefore also chunk- and
thread-count-invariant.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .base import BaseKind
from .engine import FractalSpec, cell_count, scaled_sum_block, value_block
from .errors import ModeError, PhiDomainError, RangeError
from . import theory

DEFAULT_CHUNK = 1 << 18


def phi(x: float) -> float:
    """The Wiener-Young gauge Phi(x) = x / sqrt(-ln x), Phi(0) = 0."""
    if x == 0.0:
        return 0.0
    if not 0.0 < x < 1.0:
        raise PhiDomainError(f"Phi is defined on [0, 1), got {x}")
    return x / math.sqrt(-math.log(x))


@dataclass(frozen=True)
class ReportRow:
    n: int
    t: float
    v_phi: float | None
    v_q: dict[float, float]
    theory_limit: float | None
    ratio: float | None


@dataclass
class VariationReport:
    rows: list[ReportRow] = field(default_factory=list)


def _last_cell(bn: int, t: float) -> int:
    # include cell k iff k * b**-n <= t; the top cell is clamped to bn - 1
    return min(int(math.floor(t * bn)), bn - 1)


def _chunks(cells: int, chunk_size: int):
    return [(lo, min(lo + chunk_size, cells)) for lo in range(0, cells, chunk_size)]


def _map_blocks(fn, blocks, threads: int):
    """Apply fn over blocks, results in ascending block order."""
    if threads <= 1 or len(blocks) <= 1:
        return [fn(blk) for blk in blocks]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, blocks))


def _check_t(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise RangeError(f"need t in [0, 1], got {t}")


def phi_variation(
    spec: FractalSpec,
    n: int,
    t: float = 1.0,
    *,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> float:
    """sum over cells k*b**-n <= t of Phi(|f((k+1)b**-n) - f(k b**-n)|).

    The accumulator works on |S_k| / sqrt(n ln b - ln |S_k|) and applies
    the b**-n scale once at the end; cells with S_k = 0 contribute 0.
    """
    if not spec.is_critical:
        raise ModeError("Phi-variation is defined in critical mode only")
    _check_t(t)
    bn = cell_count(spec, n)
    cells = _last_cell(bn, t) + 1
    ln_b = math.log(spec.b)
    scale = float(spec.b) ** (-n)
    blocks = _chunks(cells, chunk_size)

    if spec.base.kind is BaseKind.TENT:
        def hist_block(blk):
            s = scaled_sum_block(spec, n, *blk)
            return np.bincount(np.abs(s), minlength=n + 1)

        hist = np.zeros(n + 1, dtype=np.int64)
        for h in _map_blocks(hist_block, blocks, threads):
            hist[: h.size] += h
        total = math.fsum(
            int(c) * (a / math.sqrt(n * ln_b - math.log(a)))
            for a, c in enumerate(hist)
            if a > 0 and c > 0
        )
        return scale * total

    def term_block(blk):
        s = np.abs(scaled_sum_block(spec, n, *blk))
        if s.size and float(s.max()) * scale >= 1.0:
            raise PhiDomainError(f"increment magnitude >= 1 at level n={n}")
        s = s[s > 0.0]
        return (s / np.sqrt(n * ln_b - np.log(s))).tolist()

    terms = _map_blocks(term_block, blocks, threads)
    return scale * math.fsum(itertools.chain.from_iterable(terms))


def q_variation(
    spec: FractalSpec,
    n: int,
    q: float,
    t: float = 1.0,
    *,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> float:
    """sum over cells k*b**-n <= t of |increment|**q (any alpha mode)."""
    if q <= 0.0:
        raise RangeError(f"need q > 0, got {q}")
    _check_t(t)
    bn = cell_count(spec, n)
    cells = _last_cell(bn, t) + 1
    blocks = _chunks(cells, chunk_size)

    if spec.is_critical:
        scale_q = float(spec.b) ** (-(n * q))
        if spec.base.kind is BaseKind.TENT:
            def hist_block(blk):
                s = scaled_sum_block(spec, n, *blk)
                return np.bincount(np.abs(s), minlength=n + 1)

            hist = np.zeros(n + 1, dtype=np.int64)
            for h in _map_blocks(hist_block, blocks, threads):
                hist[: h.size] += h
            total = math.fsum(int(c) * a**q for a, c in enumerate(hist) if a > 0 and c > 0)
            return scale_q * total

        def term_block(blk):
            s = np.abs(scaled_sum_block(spec, n, *blk))
            return (s**q).tolist()

        terms = _map_blocks(term_block, blocks, threads)
        return scale_q * math.fsum(itertools.chain.from_iterable(terms))

    def value_term_block(blk):
        v = np.abs(value_block(spec, n, *blk))
        return (v**q).tolist()

    terms = _map_blocks(value_term_block, blocks, threads)
    return math.fsum(itertools.chain.from_iterable(terms))


def convergence_report(
    spec: FractalSpec,
    n_list: list[int],
    t_list: list[float],
    q_list: list[float] | None = None,
    *,
    threads: int = 1,
) -> VariationReport:
    """Per-level variation values with theoretical-limit ratios."""
    if not n_list or not t_list:
        raise RangeError("n_list and t_list must be nonempty")
    q_list = list(q_list or [])
    rows = []
    for n in sorted(n_list):
        for t in sorted(t_list):
            v_phi = None
            if spec.is_critical:
                v_phi = phi_variation(spec, n, t, threads=threads)
            v_q = {q: q_variation(spec, n, q, t, threads=threads) for q in q_list}
            try:
                limit = theory.phi_limit(spec, t).value
            except (ModeError, theory.UnsupportedBase):
                limit = None
            ratio = v_phi / limit if (v_phi is not None and limit) else None
            rows.append(ReportRow(n=n, t=t, v_phi=v_phi, v_q=v_q, theory_limit=limit, ratio=ratio))
    return VariationReport(rows=rows)
