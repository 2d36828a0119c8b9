import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from phivar import critical, general, tent, trig
from phivar.base import base_eval
from phivar.engine import (
    FractalSpec,
    eval_f,
    increment_exact,
    increment_stream,
    scaled_sum_block,
    value_block,
)
from phivar.errors import InvalidTolerance, RangeError


def series_difference(spec, n, k):
    """Independent oracle: the n-term truncated series, evaluated termwise."""
    b = spec.b
    alpha = spec.alpha
    return math.fsum(
        alpha**m
        * (base_eval(spec.base, (k + 1) * b ** (m - n)) - base_eval(spec.base, k * b ** (m - n)))
        for m in range(n)
    )


def test_eval_f_examples(takagi2, weier2):
    assert eval_f(takagi2, 0.0) == 0.0
    assert eval_f(takagi2, 0.5, 1e-12) == pytest.approx(0.5, abs=1e-12)
    assert eval_f(weier2, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_eval_f_tolerance_contract(takagi2):
    # f(1/3) = sum (1/2)^m phi(2^m / 3) with phi alternating 1/3-valued terms
    exact = 2.0 / 3.0  # known closed value of the Takagi function at 1/3
    assert eval_f(takagi2, 1.0 / 3.0, 1e-10) == pytest.approx(exact, abs=1e-9)
    with pytest.raises(InvalidTolerance):
        eval_f(takagi2, 0.5, 0.0)


def test_increment_examples(takagi2):
    rec = increment_exact(takagi2, 2, 0)
    assert (rec.s, rec.value) == (2, 0.5)
    rec = increment_exact(takagi2, 2, 1)
    assert (rec.s, rec.value) == (0, 0.0)
    rec = increment_exact(takagi2, 2, 3)
    assert (rec.s, rec.value) == (-2, -0.5)


def test_stream_examples(takagi2, weier2):
    vals = [r.value for r in increment_stream(takagi2, 2, 0, 4)]
    assert vals == [0.5, 0.0, 0.0, -0.5]
    assert list(increment_stream(takagi2, 2, 3, 3)) == []
    stream = [r.value for r in increment_stream(weier2, 3, 0, 8)]
    exact = [increment_exact(weier2, 3, k).value for k in range(8)]
    assert stream == exact  # bitwise


def test_stream_bitwise_matches_exact_midrange(takagi3_minus):
    recs = list(increment_stream(takagi3_minus, 4, 20, 60))
    for rec in recs:
        ref = increment_exact(takagi3_minus, 4, rec.k)
        assert rec == ref


def test_stream_range_errors(takagi2):
    with pytest.raises(RangeError):
        list(increment_stream(takagi2, 2, 3, 2))
    with pytest.raises(RangeError):
        list(increment_stream(takagi2, 2, 0, 5))
    with pytest.raises(RangeError):
        increment_exact(takagi2, 2, 4)


def test_level_cap():
    spec = critical(tent(), 2, 1)
    with pytest.raises(OverflowError):
        increment_exact(spec, 64, 0)


@pytest.mark.parametrize(
    "spec",
    [
        critical(tent(), 2, 1),
        critical(tent(), 3, -1),
        critical(trig(1, 0), 2, 1),
        general(tent(), 2, 0.7),
        general(trig(0.5, 0.5), 3, -0.4),
    ],
    ids=["tak2", "tak3-", "weier2", "gen-tent", "gen-trig"],
)
@pytest.mark.parametrize("n", [1, 3, 6])
def test_oracle_equivalence(spec, n):
    for k in range(spec.b**n):
        rec = increment_exact(spec, n, k)
        assert rec.value == pytest.approx(series_difference(spec, n, k), abs=1e-10)


def test_telescoping_sum(takagi2, takagi3_plus, weier2):
    for spec, n in [(takagi2, 8), (takagi3_plus, 5)]:
        assert sum(r.s for r in increment_stream(spec, n, 0, spec.b**n)) == 0
    total = math.fsum(r.value for r in increment_stream(weier2, 8, 0, 2**8))
    assert abs(total) <= 1e-9


@given(data=hst.data(), n=hst.integers(2, 8))
@settings(max_examples=40, deadline=None)
def test_digit_decomposition_locality(data, n):
    # Y_j depends only on k mod b**j: bumping k by b**m leaves Y_1..Y_m alone
    from phivar.base import scaled_increment

    b = data.draw(hst.sampled_from([2, 3]))
    spec = critical(tent(), b, 1)
    m = data.draw(hst.integers(1, n - 1))
    k = data.draw(hst.integers(0, b**n - 1 - b**m))
    for j in range(1, m + 1):
        y1 = scaled_increment(spec.base, b, j, k % b**j)
        y2 = scaled_increment(spec.base, b, j, (k + b**m) % b**j)
        assert y1 == y2


@pytest.mark.parametrize(
    "spec,n",
    [(critical(tent(), 2, 1), 10), (critical(tent(), 3, -1), 6), (critical(trig(2, -1), 2, 1), 9)],
    ids=["tak2", "tak3-", "weier2"],
)
def test_s_bounds(spec, n):
    s = scaled_sum_block(spec, n, 0, spec.b**n)
    assert np.max(np.abs(s)) <= n * spec.base.lipschitz_bound + 1e-9


def test_blocks_match_stream(takagi2, weier2):
    for spec in (takagi2, weier2):
        s = scaled_sum_block(spec, 6, 0, 64)
        v = value_block(spec, 6, 0, 64)
        for rec in increment_stream(spec, 6, 0, 64):
            assert s[rec.k] == pytest.approx(rec.s, abs=1e-12)
            assert v[rec.k] == pytest.approx(rec.value, abs=1e-14)


def test_general_mode_value_block():
    spec = general(tent(), 2, 1 / math.sqrt(2))
    v = value_block(spec, 8, 0, 2**8)
    for k in (0, 17, 255):
        assert v[k] == pytest.approx(series_difference(spec, 8, k), abs=1e-10)


def test_spec_validation():
    with pytest.raises(ValueError):
        FractalSpec(tent(), 1)
    with pytest.raises(ValueError):
        FractalSpec(tent(), 2, 2)
    with pytest.raises(ValueError):
        general(tent(), 2, 1.5)
    spec = critical(tent(), 2, -1)
    assert spec.alpha == -0.5
