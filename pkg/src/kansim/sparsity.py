"""Two-stage sparsity encoding: pattern masks and zero-free streams.

Stage one drops elements whose position (mod 4) is masked out; stage two
stores the surviving nonzeros as (value, offset) pairs.  Offsets are local
to the slice's own dense sequence; global weight addresses are
reconstructed by :func:`gather_weights`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MASK_BATCH = 4
N_SLICES = 16


@dataclass(frozen=True)
class PatternMask:
    """4-bit keep mask applied in batches of four, phase-aligned to index 0.

    A disabled mask behaves like all-ones.  An all-zero mask is rejected
    (it would drop every element regardless of value).
    """

    bits: tuple[bool, bool, bool, bool]
    enabled: bool = True

    def __post_init__(self):
        if len(self.bits) != MASK_BATCH:
            raise ValueError(f"pattern mask needs {MASK_BATCH} bits, got {len(self.bits)}")
        if not any(self.bits):
            raise ValueError("pattern mask must keep at least one position per batch")

    @classmethod
    def from_string(cls, text: str, enabled: bool = True) -> "PatternMask":
        text = text.strip()
        if len(text) != MASK_BATCH or any(c not in "01" for c in text):
            raise ValueError(f"mask must be a 4-character string over {{0,1}}, got {text!r}")
        return cls(bits=tuple(c == "1" for c in text), enabled=enabled)

    @property
    def effective_bits(self) -> tuple[bool, ...]:
        return (True,) * MASK_BATCH if not self.enabled else self.bits

    @property
    def drop_rate(self) -> float:
        """Fraction of positions removed by the mask pattern alone."""
        bits = self.effective_bits
        return 1.0 - sum(bits) / MASK_BATCH

    def keep_vector(self, length: int) -> np.ndarray:
        """Boolean keep flags for a dense sequence of the given length."""
        bits = np.asarray(self.effective_bits, dtype=bool)
        reps = -(-length // MASK_BATCH)  # tail batch padded with zeros
        return np.tile(bits, reps)[:length]


@dataclass(frozen=True)
class ZeroFreeSlice:
    """One slice of the zero-free format: sorted (value, offset) pairs."""

    values: np.ndarray
    offsets: np.ndarray
    dense_length: int
    slice_id: int = 0

    def decode(self) -> np.ndarray:
        dense = np.zeros(self.dense_length)
        dense[self.offsets] = self.values
        return dense


@dataclass
class ZeroFreeStream:
    """The encoder's 16 slices; missing slices read back as empty."""

    slices: list[ZeroFreeSlice] = field(default_factory=list)

    def total_pairs(self) -> int:
        return sum(len(s.values) for s in self.slices)


@dataclass
class SparsityStats:
    dense_count: int = 0
    nonzero_count: int = 0
    mask_retained_count: int = 0

    @property
    def inherent_sparsity(self) -> float:
        return 0.0 if self.dense_count == 0 else 1.0 - self.nonzero_count / self.dense_count

    @property
    def pattern_sparsity(self) -> float:
        """Structural drop rate implied by counts (mask effect on nonzeros)."""
        if self.nonzero_count == 0:
            return 0.0
        return 1.0 - self.mask_retained_count / self.nonzero_count

    @property
    def combined_sparsity(self) -> float:
        return 0.0 if self.dense_count == 0 else 1.0 - self.mask_retained_count / self.dense_count

    def merge(self, other: "SparsityStats") -> None:
        self.dense_count += other.dense_count
        self.nonzero_count += other.nonzero_count
        self.mask_retained_count += other.mask_retained_count


def apply_pattern_mask(values, mask: PatternMask) -> np.ndarray:
    """Zero every position whose (index mod 4) bit is off; length unchanged."""
    values = np.asarray(values, dtype=np.float64)
    keep = mask.keep_vector(values.shape[-1])
    return np.where(keep, values, 0.0)


def encode_zero_free(values, slice_id: int = 0) -> ZeroFreeSlice:
    """Store the nonzeros of a dense sequence as (value, offset) pairs."""
    if not 0 <= slice_id < N_SLICES:
        raise ValueError(f"slice id {slice_id} outside [0, {N_SLICES})")
    values = np.asarray(values, dtype=np.float64)
    offsets = np.nonzero(values)[0]
    return ZeroFreeSlice(
        values=values[offsets],
        offsets=offsets,
        dense_length=values.shape[0],
        slice_id=slice_id,
    )


def decode_zero_free(slc: ZeroFreeSlice) -> np.ndarray:
    return slc.decode()


def two_stage_filter(
    values, mask: PatternMask, slice_id: int = 0
) -> tuple[ZeroFreeSlice, SparsityStats]:
    """Pattern mask followed by zero-free encoding, with counting."""
    values = np.asarray(values, dtype=np.float64)
    masked = apply_pattern_mask(values, mask)
    slc = encode_zero_free(masked, slice_id)
    stats = SparsityStats(
        dense_count=values.shape[0],
        nonzero_count=int(np.count_nonzero(values)),
        mask_retained_count=len(slc.values),
    )
    return slc, stats


def filter_batch(values: np.ndarray, mask: PatternMask | None) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized two-stage filter over the last axis.

    Returns (masked values, surviving-nonzero counts per row).  Equivalent
    to running two_stage_filter per row; the per-slice object path is kept
    for the encoder's own contract tests.
    """
    values = np.asarray(values, dtype=np.float64)
    if mask is not None:
        keep = mask.keep_vector(values.shape[-1])
        values = np.where(keep, values, 0.0)
    nnz = np.count_nonzero(values, axis=-1)
    return values, nnz


def gather_weights(offsets, row_base: int, row_length: int | None = None) -> np.ndarray:
    """Translate slice-local offsets into weight-buffer addresses."""
    offsets = np.asarray(offsets, dtype=np.int64)
    if offsets.size and (offsets.min() < 0 or (row_length is not None and offsets.max() >= row_length)):
        bad = offsets.min() if offsets.min() < 0 else offsets.max()
        raise IndexError(f"offset {int(bad)} out of range for row length {row_length}")
    return row_base + offsets


def sequential_dot(values, weights) -> float:
    """Strict in-order multiply-accumulate, the skip-equivalence reference.

    Skipping exact-zero products cannot change any partial sum, so a
    gather-MAC over the nonzeros equals this dense loop exactly.
    """
    acc = 0.0
    for v, w in zip(np.asarray(values, dtype=np.float64), np.asarray(weights, dtype=np.float64)):
        acc = acc + v * w
    return acc
