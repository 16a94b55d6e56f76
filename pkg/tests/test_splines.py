import math

import numpy as np
import pytest

from kansim import splines
from kansim.splines import (
    ConfigError,
    build_knots,
    basis_matrix,
    eval_basis,
    eval_basis_with_reuse,
    eval_basis_zero,
    reciprocal_div_free,
    silu,
)

from reference_impls import naive_basis_vector


def test_build_knots_g4_k3():
    cfg = build_knots(4, 3, (-1.0, 1.0))
    assert cfg.knots.shape == (11,)
    assert np.allclose(cfg.knots, np.arange(-2.5, 2.75, 0.5))
    assert cfg.n_bases == 7


def test_build_knots_g2_k1():
    cfg = build_knots(2, 1, (-1.0, 1.0))
    assert np.array_equal(cfg.knots, [-2.0, -1.0, 0.0, 1.0, 2.0])


def test_build_knots_uniform_spacing():
    for g in (2, 4, 8, 16):
        for k in (1, 2, 3, 4):
            cfg = build_knots(g, k)
            diffs = np.diff(cfg.knots)
            assert np.all(diffs > 0)
            assert np.allclose(diffs, cfg.h, rtol=0, atol=1e-15)
            assert len(cfg.knots) == g + 2 * k + 1


@pytest.mark.parametrize("g,k", [(3, 3), (5, 1), (32, 3), (1, 2)])
def test_build_knots_rejects_bad_grid(g, k):
    with pytest.raises(ConfigError, match="grid size"):
        build_knots(g, k)


def test_build_knots_rejects_bad_order():
    with pytest.raises(ConfigError, match="order"):
        build_knots(4, 5)
    with pytest.raises(ConfigError, match="domain"):
        build_knots(4, 3, (1.0, 1.0))


def test_zero_order_indicator():
    cfg = build_knots(4, 3)
    bv = eval_basis_zero(cfg, 0.25)
    # interval [0, 0.5) is knot index 5 -> indicator index 5
    assert bv.values[5] == 1.0
    assert bv.values.sum() == 1.0


def test_zero_order_half_open_at_knot():
    cfg = build_knots(4, 3)
    bv = eval_basis_zero(cfg, 0.5)
    assert bv.values[6] == 1.0  # the interval starting at 0.5


def test_zero_order_outside_span():
    cfg = build_knots(4, 3)
    assert eval_basis_zero(cfg, cfg.knots[-1]).values.sum() == 0.0
    assert eval_basis_zero(cfg, -100.0).values.sum() == 0.0
    assert eval_basis_zero(cfg, 100.0).values.sum() == 0.0


def test_hat_function_peak():
    cfg = build_knots(2, 1)
    bv = eval_basis(cfg, 0.0)
    assert bv.values[1] == 1.0
    assert bv.values[0] == 0.0 and bv.values[2] == 0.0


def test_partition_of_unity_random():
    rng = np.random.default_rng(1)
    cfg = build_knots(4, 3)
    xs = rng.uniform(-1, 1, 1000)
    sums = basis_matrix(cfg, xs).sum(axis=-1)
    assert np.abs(sums - 1.0).max() <= 1e-12


def test_partition_of_unity_all_configs():
    rng = np.random.default_rng(2)
    for g in (2, 4, 8, 16):
        for k in (1, 2, 3, 4):
            cfg = build_knots(g, k)
            xs = rng.uniform(-1, 1, 500)
            sums = basis_matrix(cfg, xs).sum(axis=-1)
            assert np.abs(sums - 1.0).max() <= 1e-12, (g, k)


def test_interior_nonzero_count_g16():
    # brute-force naive evaluation confirms exactly K+1 nonzero bases
    cfg = build_knots(16, 3)
    rng = np.random.default_rng(3)
    for x in rng.uniform(-0.99, 0.99, 50):
        dense = naive_basis_vector(cfg, float(x))
        assert np.count_nonzero(dense) == 4
        assert np.count_nonzero(eval_basis(cfg, float(x)).values) == 4


def test_nonzero_window_bounds():
    cfg = build_knots(8, 2)
    rng = np.random.default_rng(4)
    for x in rng.uniform(-1, 1, 200):
        bv = eval_basis(cfg, float(x))
        width = bv.nonzero_hi - bv.nonzero_lo
        assert 0 < width <= cfg.k + 1
        assert np.all(bv.values[bv.nonzero_lo:bv.nonzero_hi][[0, -1]] != 0)


def test_out_of_domain_clamping():
    cfg = build_knots(4, 3)
    left = eval_basis(cfg, -5.0)
    right = eval_basis(cfg, 5.0)
    assert abs(left.values.sum() - 1.0) <= 1e-12
    assert abs(right.values.sum() - 1.0) <= 1e-12
    assert np.array_equal(left.values, eval_basis(cfg, -1.0).values)
    # hi itself lands just inside the top interval
    assert np.array_equal(right.values, eval_basis(cfg, 1.0).values)


def test_matches_naive_recursion_bitwise():
    rng = np.random.default_rng(5)
    for g in (2, 4, 8, 16):
        for k in (1, 2, 3, 4):
            cfg = build_knots(g, k)
            for x in rng.uniform(-1, 1, 25):
                got = eval_basis(cfg, float(x)).values
                assert np.array_equal(got, naive_basis_vector(cfg, float(x))), (g, k, x)


def test_basis_matrix_matches_scalar_path():
    cfg = build_knots(8, 4)
    xs = np.random.default_rng(6).uniform(-1.2, 1.2, 64)
    mat = basis_matrix(cfg, xs)
    for row, x in zip(mat, xs):
        assert np.array_equal(row, eval_basis(cfg, float(x)).values)


def test_reuse_values_identical():
    # ~1000 random (config, x) pairs
    rng = np.random.default_rng(7)
    for g in (2, 4, 8, 16):
        for k in (1, 2, 3, 4):
            cfg = build_knots(g, k)
            for x in rng.uniform(-1, 1, 63):
                bv, with_reuse, without_reuse = eval_basis_with_reuse(cfg, float(x))
                assert np.array_equal(bv.values, eval_basis(cfg, float(x)).values)
                assert with_reuse < without_reuse


def test_reuse_saving_near_one_fifth():
    savings = []
    for g in (2, 4, 8, 16):
        with_reuse, without_reuse = splines.reuse_op_counts(g, 3)
        savings.append(1.0 - with_reuse / without_reuse)
    assert abs(float(np.mean(savings)) - 0.21) <= 0.07


def test_stage_buffer_contents():
    cfg = build_knots(4, 2)
    buf = splines.build_stage_buffer(cfg, 0.3)
    assert np.array_equal(buf.diffs_left, 0.3 - cfg.knots)
    assert np.array_equal(buf.diffs_right, cfg.knots - 0.3)


@pytest.mark.parametrize(
    "m,h,expected",
    [(2, 0.5, 1.0), (4, 0.125, 2.0), (1, 0.25, 4.0)],
)
def test_reciprocal_powers_of_two(m, h, expected):
    assert reciprocal_div_free(m, h) == expected


def test_reciprocal_one_third_matches_division():
    for g in (2, 4, 8, 16):
        h = 2.0 / g
        for m in (1, 2, 3, 4):
            got = reciprocal_div_free(m, h)
            assert got == 1.0 / (m * h), (m, h)
            assert got * (m * h) == 1.0


def test_reciprocal_rejects_bad_span():
    with pytest.raises(ConfigError, match="order"):
        reciprocal_div_free(5, 0.5)
    with pytest.raises(ConfigError, match="power of two"):
        reciprocal_div_free(2, 0.3)


def test_silu_values():
    assert silu(0.0) == 0.0
    assert abs(silu(10.0) - 10.0 / (1.0 + math.exp(-10.0))) < 1e-12
    assert abs(silu(-10.0) - (-10.0 / (1.0 + math.exp(10.0)))) < 1e-15
    assert abs(silu(-10.0) - (-4.5398e-4)) < 1e-7


def test_silu_limits_and_vector():
    assert silu(-1000.0) == pytest.approx(0.0, abs=1e-30)
    assert silu(1000.0) == pytest.approx(1000.0)
    xs = np.linspace(-5, 5, 11)
    assert np.allclose(silu(xs), [silu(float(x)) for x in xs], rtol=0, atol=0)
