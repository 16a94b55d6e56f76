"""B-spline basis evaluation over uniform extended knot grids.

The basis parametrization follows the EfficientKAN convention: a grid of
``g`` intervals over a fixed domain ``[lo, hi]``, extended by ``k`` extra
knots on each side, which yields ``g + k`` order-``k`` basis functions and
a partition of unity on ``[lo, hi)``.

The module also provides the hardware-oriented evaluation variants as
countable functional equivalents: knot-difference reuse through a stage
buffer, and division-free reciprocals of the uniform knot spans (shifts
plus a stored 1/3 constant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SUPPORTED_GRID_SIZES = (2, 4, 8, 16)
SUPPORTED_ORDERS = (1, 2, 3, 4)

# Stored constant standing in for the hardware's 1/3 lookup entry.  All
# other supported span reciprocals are exact powers of two.
ONE_THIRD = 1.0 / 3.0


class ConfigError(ValueError):
    """Raised for unsupported grid size / order / domain combinations."""


@dataclass(frozen=True)
class SplineConfig:
    """Immutable knot-grid description shared by every evaluation routine.

    ``knots`` has length ``g + 2k + 1``, uniformly spaced by
    ``h = (hi - lo) / g`` and spanning ``[lo - k*h, hi + k*h]``.
    """

    g: int
    k: int
    lo: float
    hi: float
    knots: np.ndarray

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / self.g

    @property
    def n_bases(self) -> int:
        """Number of order-k basis functions: g + k."""
        return self.g + self.k

    @property
    def n_intervals(self) -> int:
        """Number of zero-order indicator intervals: g + 2k."""
        return self.g + 2 * self.k


@dataclass(frozen=True)
class BasisVector:
    """Basis evaluations at one input plus the nonzero index window.

    ``nonzero_hi`` is exclusive; an all-zero vector has ``nonzero_lo ==
    nonzero_hi == 0``.
    """

    values: np.ndarray
    nonzero_lo: int
    nonzero_hi: int

    @classmethod
    def from_values(cls, values: np.ndarray) -> "BasisVector":
        nz = np.nonzero(values)[0]
        if nz.size == 0:
            return cls(values=values, nonzero_lo=0, nonzero_hi=0)
        return cls(values=values, nonzero_lo=int(nz[0]), nonzero_hi=int(nz[-1]) + 1)


@dataclass(frozen=True)
class StageBuffer:
    """Input-to-knot differences computed once at the zero-order step.

    ``diffs_left[i] = x - knots[i]`` and ``diffs_right[i] = knots[i] - x``
    for every knot, so the recursion's numerators for all orders are plain
    buffer reads.
    """

    diffs_left: np.ndarray
    diffs_right: np.ndarray


def build_knots(g: int, k: int, domain: tuple[float, float] = (-1.0, 1.0)) -> SplineConfig:
    """Build the uniform extended knot grid for a (g, k) configuration.

    Raises ConfigError for grid sizes outside {2, 4, 8, 16}, orders outside
    {1, 2, 3, 4}, or an empty domain.
    """
    if g not in SUPPORTED_GRID_SIZES:
        raise ConfigError(f"unsupported grid size: {g} (supported: {SUPPORTED_GRID_SIZES})")
    if k not in SUPPORTED_ORDERS:
        raise ConfigError(f"unsupported spline order: {k} (supported: {SUPPORTED_ORDERS})")
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise ConfigError(f"empty domain: [{lo}, {hi}]")
    h = (hi - lo) / g
    knots = lo + np.arange(-k, g + k + 1, dtype=np.float64) * h
    return SplineConfig(g=g, k=k, lo=lo, hi=hi, knots=knots)


def clamp_to_domain(cfg: SplineConfig, x):
    """Clamp inputs into [lo, hi), nudging hi just below the boundary.

    The knot intervals are half-open, so the topmost domain point would
    otherwise fall outside every order-k support and break the partition
    of unity.
    """
    top = np.nextafter(cfg.hi, cfg.lo)
    return np.clip(x, cfg.lo, top)


def eval_basis_zero(cfg: SplineConfig, x: float) -> BasisVector:
    """Zero-order indicator bases: 1 on [knots[i], knots[i+1]), else 0.

    No clamping: an input outside the extended knot span yields all zeros.
    """
    values = np.zeros(cfg.n_intervals)
    idx = int(np.searchsorted(cfg.knots, x, side="right")) - 1
    if 0 <= idx < cfg.n_intervals:
        values[idx] = 1.0
    return BasisVector.from_values(values)


def _raise_order(bases: np.ndarray, knots: np.ndarray, x, order: int) -> np.ndarray:
    # One Cox-de Boor step; `bases` holds order-1 values and shrinks by one.
    left_num = x - knots[: -order - 1]
    left_den = knots[order:-1] - knots[: -order - 1]
    right_num = knots[order + 1 :] - x
    right_den = knots[order + 1 :] - knots[1:-order]
    return (left_num / left_den) * bases[..., :-1] + (right_num / right_den) * bases[..., 1:]


def basis_matrix(cfg: SplineConfig, xs) -> np.ndarray:
    """Vectorized order-k basis evaluation; returns shape ``xs.shape + (g+k,)``.

    Inputs are clamped to the domain first.  Elementwise arithmetic is
    identical to the scalar recursion, so results match eval_basis bit for
    bit.
    """
    xs = clamp_to_domain(cfg, np.asarray(xs, dtype=np.float64))
    xcol = xs[..., np.newaxis]
    knots = cfg.knots
    bases = ((xcol >= knots[:-1]) & (xcol < knots[1:])).astype(np.float64)
    for order in range(1, cfg.k + 1):
        bases = _raise_order(bases, knots, xcol, order)
    return bases


def eval_basis(cfg: SplineConfig, x: float) -> BasisVector:
    """Order-k basis vector at one (clamped) input."""
    values = basis_matrix(cfg, float(x))
    return BasisVector.from_values(values)


def build_stage_buffer(cfg: SplineConfig, x: float) -> StageBuffer:
    xc = float(clamp_to_domain(cfg, float(x)))
    return StageBuffer(diffs_left=xc - cfg.knots, diffs_right=cfg.knots - xc)


# Operation-counting convention for the difference-reuse comparison, shared
# with the simulator's SPU accounting: every add/subtract/multiply and every
# reciprocal lookup is one operation; the recursion is dense (g + k nodes at
# every order level, never support-pruned); the zero-order knot differences
# are counted in both variants because the indicator comparisons need the
# same subtractions, reuse only stores them.
#
# Per node without reuse: 2 numerator subs + 2 reciprocal lookups
#                         + 2 coefficient muls + 2 basis muls + 1 add  -> 9
# Per node with reuse:    numerators read from the stage buffer        -> 7
_OPS_PER_NODE_WITHOUT_REUSE = 9
_OPS_PER_NODE_WITH_REUSE = 7


def reuse_op_counts(g: int, k: int) -> tuple[int, int]:
    """(ops with stage-buffer reuse, ops without) for one basis evaluation."""
    nodes = k * (g + k)
    fill = g + 2 * k + 1
    return (
        _OPS_PER_NODE_WITH_REUSE * nodes + fill,
        _OPS_PER_NODE_WITHOUT_REUSE * nodes + fill,
    )


def eval_basis_with_reuse(cfg: SplineConfig, x: float) -> tuple[BasisVector, int, int]:
    """eval_basis through the stage buffer, plus both operation counts.

    The cached numerator differences are the same floats the plain
    recursion computes, so the values are identical; only the bookkeeping
    differs.
    """
    buf = build_stage_buffer(cfg, x)
    knots = cfg.knots
    bases = (buf.diffs_left[:-1] >= 0.0) & (buf.diffs_right[1:] > 0.0)
    bases = bases.astype(np.float64)
    for order in range(1, cfg.k + 1):
        left = buf.diffs_left[: -order - 1] / (knots[order:-1] - knots[: -order - 1])
        right = buf.diffs_right[order + 1 :] / (knots[order + 1 :] - knots[1:-order])
        bases = left * bases[:-1] + right * bases[1:]
    with_reuse, without_reuse = reuse_op_counts(cfg.g, cfg.k)
    return BasisVector.from_values(bases), with_reuse, without_reuse


def reciprocal_div_free(span_multiple: int, h: float) -> float:
    """1 / (span_multiple * h) from power-of-two scalings and a 1/3 constant.

    Valid for span multiples 1..4 (the uniform-grid denominators of orders
    up to 4) and h an exact power of two; the result is bit-identical to
    direct division.
    """
    if span_multiple not in (1, 2, 3, 4):
        raise ConfigError(f"unsupported order: span multiple {span_multiple} not in 1..4")
    mantissa, exponent = math.frexp(h)
    if mantissa != 0.5 or h <= 0.0:
        raise ConfigError(f"knot spacing {h} is not a power of two")
    log2_h = exponent - 1
    if span_multiple == 3:
        return math.ldexp(ONE_THIRD, -log2_h)
    shift = {1: 0, 2: 1, 4: 2}[span_multiple]
    return math.ldexp(1.0, -log2_h - shift)


def silu(x):
    """x / (1 + exp(-x)), evaluated in the overflow-safe sigmoid form."""
    arr = np.asarray(x, dtype=np.float64)
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = arr[pos] / (1.0 + np.exp(-arr[pos]))
    ex = np.exp(arr[~pos])
    out[~pos] = arr[~pos] * ex / (1.0 + ex)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out
