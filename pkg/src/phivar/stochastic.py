"""Probabilistic machinery: digit sampling, chain algebra, CLT diagnostics.

The level increments of a critical spec are driven by uniform base-b
digits U_1, U_2, ...  For the tent base the raw slope values form (odd b)
a {-1, 0, +1} Markov chain or (even b) an i.i.d. Rademacher sequence, and
the per-step update only needs the previous state and the new digit:

    m = 1:     state +1 / 0 / -1 as 2*U_1 + 1 compares below / at / above b
    m >= 2:    c = b - 1 - 2*U_m; state is +1 if c >= 1, -1 if c <= -1,
               and unchanged if c = 0 (odd b only)

which reproduces the exact grid comparison 2*(k mod b**m) + 1 vs b**m
without any big-integer arithmetic, so sampled paths of length thousands
stay exact for the tent base.  Chain matrices are exact rationals.

Random digits come from counter-based Philox streams keyed by (seed,
block index) over fixed-size path blocks, so ensembles are reproducible
and independent of how sampling work is partitioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .base import BaseKind, PeriodicBase, scaled_increment, scaled_increment_block, trig_slope
from .engine import FractalSpec, cell_count
from . import variation
from .errors import BaseError, ModeError, ParityError, RangeError

_PATH_BLOCK = 4096  # paths per Philox stream; fixed so ensembles never depend on scheduling

Matrix = tuple[tuple[Fraction, ...], ...]


# ---------------------------------------------------------------------------
# Exact chain algebra (odd b, tent base)

def _check_odd(b: int) -> None:
    if b < 3 or b % 2 == 0:
        raise ParityError(f"chain operations need odd b >= 3, got {b}")


def _check_sign(sign: int) -> None:
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")


def transition_matrix(b: int, sign: int) -> Matrix:
    """The 3x3 transition matrix on states (-1, 0, +1), exact rationals."""
    _check_odd(b)
    _check_sign(sign)
    s = sign
    d = 2 * b
    return (
        (Fraction(b + s, d), Fraction(0), Fraction(b - s, d)),
        (Fraction(b - 1, d), Fraction(2, d), Fraction(b - 1, d)),
        (Fraction(b - s, d), Fraction(0), Fraction(b + s, d)),
    )


def initial_distribution(b: int) -> tuple[Fraction, Fraction, Fraction]:
    _check_odd(b)
    return (Fraction(b - 1, 2 * b), Fraction(1, b), Fraction(b - 1, 2 * b))


@dataclass(frozen=True)
class ChainSpec:
    """The {-1, 0, +1} chain governing tent slope values for odd b."""

    b: int
    sign: int
    mu1: tuple[Fraction, Fraction, Fraction]
    P: Matrix


def chain_spec(b: int, sign: int) -> ChainSpec:
    return ChainSpec(b=b, sign=sign, mu1=initial_distribution(b), P=transition_matrix(b, sign))


def restricted_matrix(b: int, sign: int) -> Matrix:
    """One-step transitions on the recurrent states {-1, +1} (state 0 dropped)."""
    P = transition_matrix(b, sign)
    return ((P[0][0], P[0][2]), (P[2][0], P[2][2]))


def restricted_nstep(b: int, sign: int, n: int) -> Matrix:
    """Closed-form n-step restricted transitions: (1 +/- (sign*b)**-n) / 2."""
    _check_odd(b)
    _check_sign(sign)
    if n < 0:
        raise RangeError(f"need n >= 0, got {n}")
    g = Fraction(1, (sign * b) ** n)
    return (
        ((1 + g) / 2, (1 - g) / 2),
        ((1 - g) / 2, (1 + g) / 2),
    )


def chain_cov(b: int, sign: int, n: int) -> Fraction:
    """Stationary covariance of restricted states n steps apart: (sign*b)**-n."""
    _check_odd(b)
    _check_sign(sign)
    if n < 0:
        raise RangeError(f"need n >= 0, got {n}")
    return Fraction(1, (sign * b) ** n)


def chain_sigma2(b: int, sign: int) -> Fraction:
    """Long-run CLT variance 1 + 2 sum_n cov = (b + sign) / (b - sign)."""
    _check_odd(b)
    _check_sign(sign)
    return Fraction(b + sign, b - sign)


# ---------------------------------------------------------------------------
# Seeded sampling

def _digit_blocks(b: int, n: int, count: int, seed: int) -> np.ndarray:
    if not 0 <= seed < 2**63:
        raise RangeError(f"seed must fit in 63 bits, got {seed}")
    out = np.empty((count, n), dtype=np.int16)
    for blk, lo in enumerate(range(0, count, _PATH_BLOCK)):
        hi = min(lo + _PATH_BLOCK, count)
        rng = np.random.Generator(np.random.Philox(key=[seed, blk]))
        out[lo:hi] = rng.integers(0, b, size=(hi - lo, n), dtype=np.int16)
    return out


def _tent_raw_states(b: int, digits: np.ndarray) -> np.ndarray:
    """Exact raw tent slope states from a (count, n) digit matrix."""
    count, n = digits.shape
    y = np.empty((count, n), dtype=np.int8)
    u = digits[:, 0].astype(np.int64)
    y[:, 0] = np.where(2 * u + 2 <= b, 1, np.where(2 * u + 1 == b, 0, -1))
    for m in range(1, n):
        c = b - 1 - 2 * digits[:, m].astype(np.int64)
        y[:, m] = np.where(c >= 1, 1, np.where(c <= -1, -1, y[:, m - 1]))
    return y


def _grid_positions(b: int, digits: np.ndarray) -> np.ndarray:
    """x_m = b**-m * (k mod b**m) along each path, via the contraction recursion."""
    count, n = digits.shape
    x = np.empty((count, n), dtype=np.float64)
    cur = np.zeros(count, dtype=np.float64)
    for m in range(n):
        cur = (cur + digits[:, m]) / b
        x[:, m] = cur
    return x


def _trig_raw_states(base: PeriodicBase, b: int, x: np.ndarray) -> np.ndarray:
    count, n = x.shape
    y = np.empty((count, n), dtype=np.float64)
    for m in range(1, n + 1):
        y[:, m - 1] = trig_slope(base, x[:, m - 1], float(b) ** (-m))
    return y


def _signed(raw: np.ndarray, sign: int) -> np.ndarray:
    if sign == 1:
        return raw
    signs = np.where(np.arange(1, raw.shape[1] + 1) % 2 == 0, 1, -1)
    return raw * signs.astype(raw.dtype if raw.dtype != np.int8 else np.int8)


@dataclass
class PathSample:
    """One sampled digit path with its slope values and running sums."""

    seed: int | None
    n: int
    digits: np.ndarray  # U_1..U_n
    y: np.ndarray       # signed slope values Y_1..Y_n
    z: np.ndarray       # Z_0..Z_n running sums
    x: np.ndarray       # b**-m * R_m grid positions
    qv: np.ndarray | None = None  # running <Z>_1..<Z>_n, filled by predictable_qv


def path_from_digits(spec: FractalSpec, digits: np.ndarray, seed: int | None = None) -> PathSample:
    """Build a PathSample from an explicit digit sequence."""
    if not spec.is_critical:
        raise ModeError("path sampling is defined in critical mode only")
    digits = np.asarray(digits, dtype=np.int16).reshape(1, -1)
    n = digits.shape[1]
    x = _grid_positions(spec.b, digits)
    if spec.base.kind is BaseKind.TENT:
        raw = _tent_raw_states(spec.b, digits)
    else:
        raw = _trig_raw_states(spec.base, spec.b, x)
    y = _signed(raw, spec.alpha_sign)[0]
    z = np.concatenate(([0.0], np.cumsum(y, dtype=np.float64)))
    return PathSample(seed=seed, n=n, digits=digits[0], y=y, z=z, x=x[0])


@dataclass
class Ensemble:
    """A reproducible ensemble of sampled paths, stored column-wise."""

    spec: FractalSpec
    n: int
    count: int
    seed: int
    digits: np.ndarray  # (count, n)
    y: np.ndarray       # (count, n) signed slope values

    def z_final(self) -> np.ndarray:
        return self.y.sum(axis=1, dtype=np.float64)

    def __len__(self) -> int:
        return self.count

    def __getitem__(self, i: int) -> PathSample:
        path = path_from_digits(self.spec, self.digits[i], seed=self.seed)
        return path


def sample_paths(spec: FractalSpec, n: int, count: int, seed: int) -> Ensemble:
    """Draw ``count`` independent digit paths of length ``n``; reproducible."""
    if not spec.is_critical:
        raise ModeError("path sampling is defined in critical mode only")
    if count < 1:
        raise RangeError(f"need count >= 1, got {count}")
    digits = _digit_blocks(spec.b, n, count, seed)
    if spec.base.kind is BaseKind.TENT:
        raw = _tent_raw_states(spec.b, digits)
    else:
        raw = _trig_raw_states(spec.base, spec.b, _grid_positions(spec.b, digits))
    return Ensemble(spec=spec, n=n, count=count, seed=seed, digits=digits, y=_signed(raw, spec.alpha_sign))


# ---------------------------------------------------------------------------
# CLT diagnostics

def scaled_phi_terms(z: np.ndarray, n: int, b: int) -> np.ndarray:
    """b**n * Phi(b**-n |z|) = |z| / sqrt(n ln b - ln |z|), zero at z = 0."""
    a = np.abs(np.asarray(z, dtype=np.float64))
    out = np.zeros_like(a)
    mask = a > 0.0
    out[mask] = a[mask] / np.sqrt(n * math.log(b) - np.log(a[mask]))
    return out


def clt_scaled_expectation(
    spec: FractalSpec,
    n: int,
    *,
    mc_count: int | None = None,
    seed: int = 0,
) -> float:
    """b**n E[Phi(b**-n |Z_n|)]; exhaustive (default) or Monte Carlo.

    The exhaustive value is, identically, the full Phi-variation at t = 1.
    """
    if mc_count is None:
        return variation.phi_variation(spec, n, 1.0)
    ens = sample_paths(spec, n, mc_count, seed)
    terms = scaled_phi_terms(ens.z_final(), n, spec.b)
    return math.fsum(terms.tolist()) / mc_count


def martingale_residual(spec: FractalSpec, n: int, r: int) -> float:
    """E[Y_n | R_{n-1} = r] by exact enumeration of the n-th digit."""
    if not spec.is_critical:
        raise ModeError("martingale residuals are defined in critical mode only")
    cell_count(spec, n)
    bnm1 = spec.b ** (n - 1)
    if not 0 <= r < bnm1:
        raise RangeError(f"need 0 <= r < b**(n-1) = {bnm1}, got {r}")
    total = math.fsum(
        scaled_increment(spec.base, spec.b, n, r + u * bnm1) for u in range(spec.b)
    )
    return (spec.alpha_sign**n) * total / spec.b


def max_abs_martingale_residual(spec: FractalSpec, n: int) -> float:
    """max over r of |E[Y_n | R_{n-1} = r]|, vectorized over all r."""
    if not spec.is_critical:
        raise ModeError("martingale residuals are defined in critical mode only")
    cell_count(spec, n)
    bnm1 = spec.b ** (n - 1)
    r = np.arange(bnm1, dtype=np.int64)
    acc = np.zeros(bnm1, dtype=np.float64)
    for u in range(spec.b):
        acc += scaled_increment_block(spec.base, spec.b, n, r + u * bnm1)
    return float(np.max(np.abs(acc))) / spec.b


def predictable_qv(spec: FractalSpec, path: PathSample) -> np.ndarray:
    """Running predictable quadratic variation <Z>_1..<Z>_n along a path.

    Each conditional second moment is the exact b-term slope-square
    average at positions b**-k R_{k-1} + l/b; trig base only (the tent
    slopes are not martingale differences).
    """
    if spec.base.kind is not BaseKind.TRIG:
        raise BaseError("predictable quadratic variation needs the trig base")
    if not spec.is_critical:
        raise ModeError("predictable QV is defined in critical mode only")
    b = spec.b
    offsets = np.arange(b) / b
    out = np.empty(path.n, dtype=np.float64)
    acc = 0.0
    prev = 0.0  # b**-(k-1) R_{k-1}, starting from R_0 = 0
    for k in range(1, path.n + 1):
        pos = prev / b + offsets
        slopes = trig_slope(spec.base, pos, float(b) ** (-k))
        acc += float(np.mean(slopes**2))
        out[k - 1] = acc
        prev = path.x[k - 1]
    return out


def ks_uniform(samples: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance of samples to the uniform law on [0, 1]."""
    u = np.sort(np.asarray(samples, dtype=np.float64))
    m = u.size
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - u), np.max(u - (i - 1) / m)))


def _normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def ks_normal(samples: np.ndarray, sigma2: float) -> float:
    """KS distance of samples to N(0, sigma2)."""
    if sigma2 <= 0.0:
        raise RangeError(f"need sigma2 > 0, got {sigma2}")
    s = math.sqrt(sigma2)
    u = np.sort(np.asarray(samples, dtype=np.float64))
    m = u.size
    cdf = np.array([_normal_cdf(v / s) for v in u])
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - cdf), np.max(cdf - (i - 1) / m)))


def equidistribution_stat(path: PathSample, b: int) -> float:
    """KS distance of the visited grid positions b**-k R_k to uniform."""
    if path.n < 100:
        raise RangeError(f"need path length >= 100, got {path.n}")
    return ks_uniform(path.x)


def transition_counts(ensemble: Ensemble) -> np.ndarray:
    """Pooled 3x3 transition counts of the signed slope states (tent base)."""
    if ensemble.spec.base.kind is not BaseKind.TENT:
        raise BaseError("transition counts apply to the tent-base chain")
    counts = np.zeros(9, dtype=np.int64)
    step = 8192
    for lo in range(0, ensemble.count, step):
        y = ensemble.y[lo : lo + step].astype(np.int64)
        idx = (y[:, :-1] + 1) * 3 + (y[:, 1:] + 1)
        counts += np.bincount(idx.ravel(), minlength=9)
    return counts.reshape(3, 3)
