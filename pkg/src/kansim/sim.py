"""Cycle-approximate model of the reconfigurable spline/MLP core.

Structure being modeled: a 16-lane SIMD core (SiLU), a 16-unit spline
array (SPU), a 16-unit MAC array (PE), a two-stage sparsity encoder (TSE)
with 16 slices, and a 4-bank weight buffer.  Two dataflows:

* pipeline mode (KAN): stage 1 evaluates basis vectors and SiLU for up to
  16 input features at a time and encodes survivors into the TSE; stage 2
  streams the surviving intermediates through the PE array, 16 output
  nodes per pass, one stream element per cycle.  Stages overlap sample to
  sample (double-buffered), so a layer costs
  ``stage1(first sample) + sum over samples of max(stage1, stage2)``.
* parallel mode (MLP): the TSE densifies post-ReLU activations (stage 1)
  and the PE array consumes them (stage 2); with the SPU array in
  accumulation mode the machine finishes 32 output nodes per pass instead
  of 16, at the price of doubling weight-port demand.

Cycle accounting conventions:

* One MAC engine retires one MAC per cycle (``pe_mac``/``spu_mac``).
* An SPU is a serial scalar datapath: each recursion node costs
  ``NODE_SLOTS`` single-cycle slots (2 coefficient muls, 2 basis muls,
  1 accumulate), each order level stages its span reciprocal once, and
  every knot difference costs one setup cycle.
* The weight buffer delivers ``weight_banks * bank_words_per_cycle *
  bank_word_weights`` weights per cycle in every mode (the banking is
  rewired, not widened, between modes); a MAC stage whose weight demand
  exceeds that supply stalls proportionally and the stall cycles are
  reported as bank conflicts.
* Zero skipping is activation-side only: the SiLU path and zero weights
  are never skipped; only TSE-filtered basis values / activations are.

The baseline ("no sparsity support, PE array only") runs the identical
pipeline with dense streams, the pattern mask ignored, and the SPU array
never used for MACs; it is the denominator of every reported speedup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    F64,
    HalfPrecisionPolicy,
    Network,
    kan_layer_forward,
    mlp_layer_forward,
    network_forward,
    synth_inputs,
    synth_model,
)
from .sparsity import PatternMask, filter_batch
from .splines import SplineConfig, basis_matrix, reuse_op_counts

# Serial slots per Cox-de Boor node in the SPU datapath (see module
# docstring); kept separate from the per-primitive cost knobs below.
NODE_SLOTS = 5

# SiLU cost in the operation-counting convention: negate, exp, add, divide.
SILU_OPS = 4

MODE_PIPELINE_KAN = "pipeline_kan"
MODE_PARALLEL_MLP = "parallel_mlp"
MODE_BASELINE = "baseline_dense"
MODES = (MODE_PIPELINE_KAN, MODE_PARALLEL_MLP, MODE_BASELINE)


class ModeError(ValueError):
    """Network kind incompatible with the requested dataflow mode."""


class SimulationError(RuntimeError):
    """A simulator invariant (conservation, functional equality) failed."""


def _default_energy_weights() -> dict:
    return {"pe_mac": 1.0, "spu_op": 1.0, "simd_op": 1.0, "tse_element": 1.0}


@dataclass
class SimConfig:
    n_spu: int = 16
    n_pe: int = 16
    simd_lanes: int = 16
    weight_banks: int = 4
    bank_words_per_cycle: int = 1
    bank_word_weights: int = 6   # weights per bank word (96-bit FP16 port)
    # unit cycle costs, 1 each by default
    spu_diff_setup_per_knot: int = 1
    spu_per_basis_per_order: int = 1
    spu_mac: int = 1             # SPU accumulation mode, parity with PEs
    pe_mac: int = 1
    simd_silu_per_lane: int = 1
    tse_encode_per_element: int = 1
    mode: str = MODE_PIPELINE_KAN
    spu_as_pe: bool = True       # parallel mode only: SPU array joins the MACs
    energy_weights: dict = field(default_factory=_default_energy_weights)

    def __post_init__(self):
        for name in (
            "n_spu", "n_pe", "simd_lanes", "weight_banks", "bank_words_per_cycle",
            "bank_word_weights", "spu_diff_setup_per_knot", "spu_per_basis_per_order",
            "spu_mac", "pe_mac", "simd_silu_per_lane", "tse_encode_per_element",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}, expected one of {MODES}")

    @property
    def weight_supply(self) -> int:
        """Weights deliverable per cycle, identical across modes."""
        return self.weight_banks * self.bank_words_per_cycle * self.bank_word_weights


@dataclass(frozen=True)
class WeightBufferScheme:
    """How the banks are wired for a mode; total port width never changes."""

    grouping: str
    groups: int
    words_per_cycle_per_group: int
    weights_per_cycle: int


def weight_buffer_scheme(cfg: SimConfig, mode: str) -> WeightBufferScheme:
    if mode == MODE_PARALLEL_MLP:
        # all four banks serve the PE and SPU arrays independently
        return WeightBufferScheme(
            grouping="mlp_four_banks_parallel",
            groups=cfg.weight_banks,
            words_per_cycle_per_group=cfg.bank_words_per_cycle,
            weights_per_cycle=cfg.weight_supply,
        )
    # pairs of banks stack into groups that feed the PE array wider words
    return WeightBufferScheme(
        grouping="kan_two_banks_stacked",
        groups=max(1, cfg.weight_banks // 2),
        words_per_cycle_per_group=2 * cfg.bank_words_per_cycle,
        weights_per_cycle=cfg.weight_supply,
    )


@dataclass
class SimReport:
    mode: str
    batch: int
    total_cycles: int
    stage1_cycles: int
    stage2_cycles: int
    spu_ops: int
    simd_ops: int
    pe_macs: int
    skipped_pe_macs: int
    dense_pe_macs: int
    spline_pe_macs: int
    silu_pe_macs: int
    bank_conflicts: int
    pe_utilization: float
    spu_utilization: float
    energy_proxy: float
    baseline_cycles: int
    speedup_vs_baseline: float
    sparsity: dict
    layers: list
    outputs: np.ndarray
    functional_ok: bool = False

    CSV_FIELDS = (
        "mode", "batch", "total_cycles", "stage1_cycles", "stage2_cycles",
        "spu_ops", "simd_ops", "pe_macs", "skipped_pe_macs", "dense_pe_macs",
        "bank_conflicts", "pe_utilization", "spu_utilization", "energy_proxy",
        "baseline_cycles", "speedup_vs_baseline",
    )

    def to_row(self) -> dict:
        return {name: getattr(self, name) for name in self.CSV_FIELDS}

    def to_dict(self) -> dict:
        row = self.to_row()
        row["spline_pe_macs"] = self.spline_pe_macs
        row["silu_pe_macs"] = self.silu_pe_macs
        row["sparsity"] = dict(self.sparsity)
        row["layers"] = [dict(entry) for entry in self.layers]
        return row


def spu_feature_cycles(cfg: SimConfig, spline: SplineConfig) -> int:
    """Stage-1 cycles for one SPU to produce one feature's basis vector."""
    n_knots = spline.knots.shape[0]
    node_cycles = NODE_SLOTS * spline.k * spline.n_bases + spline.k
    return cfg.spu_diff_setup_per_knot * n_knots + cfg.spu_per_basis_per_order * node_cycles


def _pipeline_total(st1: np.ndarray, st2: np.ndarray) -> int:
    # Double-buffered two-stage pipeline: after the first sample's stage-1
    # fill, every sample occupies one issue slot of width max(stage1,
    # stage2).  Once stage 2 undercuts stage 1 the slot width is pinned by
    # stage 1, which is exactly the sparsity plateau.
    if st1.shape[0] == 0:
        return 0
    return int(st1[0]) + int(np.maximum(st1, st2).sum())


def _stall_factor(scheme: WeightBufferScheme, demand: int) -> float:
    return max(1.0, demand / scheme.weights_per_cycle)


def _check_inputs(net: Network, inputs) -> np.ndarray:
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError(f"inputs must be a non-empty batch matrix, got shape {x.shape}")
    if x.shape[1] != net.n_in:
        raise ValueError(f"input width {x.shape[1]} != network width {net.n_in}")
    return x


def _normalize_masks(net: Network, masks) -> list:
    if masks is None:
        return [None] * len(net.layers)
    if isinstance(masks, PatternMask):
        return [masks] * len(net.layers)
    masks = list(masks)
    if len(masks) != len(net.layers):
        raise ValueError(f"expected {len(net.layers)} masks, got {len(masks)}")
    return masks


@dataclass
class _Accounting:
    stage1_cycles: int = 0
    stage2_cycles: int = 0
    total_cycles: int = 0
    spu_ops: int = 0
    simd_ops: int = 0
    spline_pe_macs: int = 0
    silu_pe_macs: int = 0
    dense_pe_macs: int = 0
    bank_conflicts: int = 0
    spu_busy: int = 0
    pe_array_macs: int = 0
    spu_array_macs: int = 0
    tse_elements: int = 0
    dense_count: int = 0
    nonzero_count: int = 0
    retained_count: int = 0
    layers: list = field(default_factory=list)


def _simulate_kan(net, inputs, masks, cfg, policy, sparse: bool) -> tuple[_Accounting, np.ndarray]:
    x = _check_inputs(net, inputs)
    masks = _normalize_masks(net, masks)
    batch = x.shape[0]
    acct = _Accounting()
    scheme = weight_buffer_scheme(cfg, MODE_PIPELINE_KAN)
    for idx, layer in enumerate(net.layers):
        spline = layer.spline
        nb = spline.n_bases
        mask = masks[idx] if sparse else None
        keep = mask.keep_vector(nb) if (mask is not None and mask.enabled) else None

        bmat = policy.round(basis_matrix(spline, policy.round(x)))
        acct.nonzero_count += int(np.count_nonzero(bmat))
        acct.dense_count += bmat.size
        masked, nnz = filter_batch(bmat, mask if sparse else None)
        nnz = nnz.sum(axis=-1)  # surviving basis values per sample
        if sparse:
            acct.retained_count += int(nnz.sum())
            stream = x.shape[1] + nnz  # surviving bases + dense SiLU terms
        else:
            acct.retained_count += int(np.count_nonzero(masked))
            stream = np.full(batch, x.shape[1] * (nb + 1))

        feature_tiles = math.ceil(x.shape[1] / cfg.n_spu)
        tse_cycles = nb * cfg.tse_encode_per_element if sparse else 0
        tile_cycles = max(
            spu_feature_cycles(cfg, spline), cfg.simd_silu_per_lane, tse_cycles
        )
        st1 = np.full(batch, feature_tiles * tile_cycles, dtype=np.int64)

        out_tiles = math.ceil(layer.n_out / cfg.n_pe)
        stall = _stall_factor(scheme, cfg.n_pe)
        raw_st2 = out_tiles * stream * cfg.pe_mac
        st2 = np.ceil(raw_st2 * stall).astype(np.int64)
        acct.bank_conflicts += int((st2 - raw_st2).sum())

        layer_total = _pipeline_total(st1, st2)
        acct.total_cycles += layer_total
        acct.stage1_cycles += int(st1.sum())
        acct.stage2_cycles += int(st2.sum())

        executed_spline = int(stream.sum() - batch * x.shape[1]) * layer.n_out
        if not sparse:
            executed_spline = batch * x.shape[1] * nb * layer.n_out
        silu_macs = batch * x.shape[1] * layer.n_out
        acct.spline_pe_macs += executed_spline
        acct.silu_pe_macs += silu_macs
        acct.dense_pe_macs += batch * x.shape[1] * (nb + 1) * layer.n_out
        acct.pe_array_macs += executed_spline + silu_macs

        acct.spu_ops += batch * x.shape[1] * reuse_op_counts(spline.g, spline.k)[0]
        acct.simd_ops += batch * x.shape[1]
        acct.spu_busy += batch * x.shape[1] * spu_feature_cycles(cfg, spline)
        if sparse:
            acct.tse_elements += batch * x.shape[1] * nb

        acct.layers.append(
            {
                "layer": idx,
                "kind": "kan",
                "n_in": x.shape[1],
                "n_out": layer.n_out,
                "stage1_per_sample": int(st1[0]),
                "stage2_mean": float(st2.mean()),
                "cycles": layer_total,
            }
        )
        x = kan_layer_forward(layer, x, policy, basis_keep=keep)
    return acct, x


def _mlp_node_split(n_out: int, units: int, n_pe: int) -> tuple[int, int]:
    # Output nodes handled by the PE array vs the SPU array per sample pass.
    pe_nodes = spu_nodes = 0
    done = 0
    while done < n_out:
        tile = min(units, n_out - done)
        pe_nodes += min(n_pe, tile)
        spu_nodes += max(0, tile - n_pe)
        done += tile
    return pe_nodes, spu_nodes


def _simulate_mlp(net, inputs, masks, cfg, policy, sparse: bool) -> tuple[_Accounting, np.ndarray]:
    x = _check_inputs(net, inputs)
    masks = _normalize_masks(net, masks)
    batch = x.shape[0]
    acct = _Accounting()
    spu_available = sparse and cfg.spu_as_pe
    scheme = weight_buffer_scheme(cfg, MODE_PARALLEL_MLP)
    for idx, layer in enumerate(net.layers):
        # engage the SPU array only when it actually removes output passes;
        # otherwise its doubled weight demand would stall for nothing
        use_spu = spu_available and (
            math.ceil(layer.n_out / (cfg.n_pe + cfg.n_spu)) < math.ceil(layer.n_out / cfg.n_pe)
        )
        units = cfg.n_pe + (cfg.n_spu if use_spu else 0)
        mask = masks[idx] if sparse else None
        xr = policy.round(x)
        acct.dense_count += xr.size
        acct.nonzero_count += int(np.count_nonzero(xr))
        masked, nnz = filter_batch(xr, mask if sparse else None)
        if sparse:
            acct.retained_count += int(nnz.sum())
            stream = nnz
        else:
            acct.retained_count += int(np.count_nonzero(masked))
            stream = np.full(batch, x.shape[1])

        in_tiles = math.ceil(x.shape[1] / cfg.simd_lanes)
        st1_cost = in_tiles * (cfg.tse_encode_per_element if sparse else 1)
        st1 = np.full(batch, st1_cost, dtype=np.int64)

        out_tiles = math.ceil(layer.n_out / units)
        elem_cost = max(cfg.pe_mac, cfg.spu_mac) if use_spu else cfg.pe_mac
        demand = cfg.n_pe + (cfg.n_spu if use_spu else 0)
        stall = _stall_factor(scheme, demand)
        raw_st2 = out_tiles * stream * elem_cost
        st2 = np.ceil(raw_st2 * stall).astype(np.int64)
        acct.bank_conflicts += int((st2 - raw_st2).sum())

        layer_total = _pipeline_total(st1, st2)
        acct.total_cycles += layer_total
        acct.stage1_cycles += int(st1.sum())
        acct.stage2_cycles += int(st2.sum())

        acct.dense_pe_macs += batch * x.shape[1] * layer.n_out
        pe_nodes, spu_nodes = _mlp_node_split(layer.n_out, units, cfg.n_pe)
        acct.pe_array_macs += int(stream.sum()) * pe_nodes
        acct.spu_array_macs += int(stream.sum()) * spu_nodes
        if sparse:
            acct.tse_elements += batch * x.shape[1]

        acct.layers.append(
            {
                "layer": idx,
                "kind": "mlp",
                "n_in": x.shape[1],
                "n_out": layer.n_out,
                "stage1_per_sample": int(st1[0]),
                "stage2_mean": float(st2.mean()),
                "cycles": layer_total,
            }
        )

        if mask is not None and mask.enabled:
            keep = mask.keep_vector(x.shape[1])
            x = np.where(keep, x, 0.0)
        x = mlp_layer_forward(layer, x, policy)
    return acct, x


def _finish_report(
    acct: _Accounting,
    mode: str,
    batch: int,
    cfg: SimConfig,
    outputs: np.ndarray,
    baseline_cycles: int,
) -> SimReport:
    executed = acct.pe_array_macs + acct.spu_array_macs
    skipped = acct.dense_pe_macs - executed
    if skipped < 0 or executed < 0:
        raise SimulationError(
            f"MAC conservation violated: executed {executed} of {acct.dense_pe_macs} dense"
        )
    total = acct.total_cycles
    engines_pe = cfg.n_pe * total
    engines_spu = cfg.n_spu * total
    weights = cfg.energy_weights
    energy = (
        executed * weights.get("pe_mac", 1.0)
        + acct.spu_ops * weights.get("spu_op", 1.0)
        + acct.simd_ops * weights.get("simd_op", 1.0)
        + acct.tse_elements * weights.get("tse_element", 1.0)
    )
    spu_busy = acct.spu_busy + acct.spu_array_macs * cfg.spu_mac
    return SimReport(
        mode=mode,
        batch=batch,
        total_cycles=total,
        stage1_cycles=acct.stage1_cycles,
        stage2_cycles=acct.stage2_cycles,
        spu_ops=acct.spu_ops,
        simd_ops=acct.simd_ops,
        pe_macs=executed,
        skipped_pe_macs=skipped,
        dense_pe_macs=acct.dense_pe_macs,
        spline_pe_macs=acct.spline_pe_macs,
        silu_pe_macs=acct.silu_pe_macs,
        bank_conflicts=acct.bank_conflicts,
        pe_utilization=0.0 if total == 0 else acct.pe_array_macs * cfg.pe_mac / engines_pe,
        spu_utilization=0.0 if total == 0 else min(1.0, spu_busy / engines_spu),
        energy_proxy=float(energy),
        baseline_cycles=baseline_cycles,
        speedup_vs_baseline=baseline_cycles / total if total else 1.0,
        sparsity={
            "dense_count": acct.dense_count,
            "nonzero_count": acct.nonzero_count,
            "mask_retained_count": acct.retained_count,
            "combined_sparsity": (
                0.0 if acct.dense_count == 0 else 1.0 - acct.retained_count / acct.dense_count
            ),
        },
        layers=acct.layers,
        outputs=outputs,
    )


def _functional_check(report: SimReport, net, inputs, masks, policy) -> SimReport:
    """The simulator never changes math, only timing; prove it every run."""
    want = network_forward(net, inputs, policy, masks=masks)
    if not np.array_equal(report.outputs, want):
        raise SimulationError("simulated outputs diverge from the reference forward pass")
    report.functional_ok = True
    return report


def simulate_baseline(
    net: Network,
    inputs,
    cfg: SimConfig | None = None,
    policy: HalfPrecisionPolicy = F64,
) -> SimReport:
    """Dense PE-only execution: no TSE skipping, no mask, no SPU MACs."""
    cfg = cfg or SimConfig(mode=MODE_BASELINE)
    if net.kind == "kan":
        acct, outputs = _simulate_kan(net, inputs, None, cfg, policy, sparse=False)
    else:
        acct, outputs = _simulate_mlp(net, inputs, None, cfg, policy, sparse=False)
    batch = np.asarray(inputs).shape[0]
    report = _finish_report(acct, MODE_BASELINE, batch, cfg, outputs, acct.total_cycles)
    return _functional_check(report, net, inputs, None, policy)


def simulate_pipeline_kan(
    net: Network,
    inputs,
    masks=None,
    cfg: SimConfig | None = None,
    policy: HalfPrecisionPolicy = F64,
) -> SimReport:
    cfg = cfg or SimConfig(mode=MODE_PIPELINE_KAN)
    if net.kind != "kan":
        raise ModeError(f"pipeline mode requires a pure-KAN network, got {net.kind}")
    acct, outputs = _simulate_kan(net, inputs, masks, cfg, policy, sparse=True)
    baseline = simulate_baseline(net, inputs, cfg, policy)
    batch = np.asarray(inputs).shape[0]
    report = _finish_report(
        acct, MODE_PIPELINE_KAN, batch, cfg, outputs, baseline.total_cycles
    )
    return _functional_check(report, net, inputs, _normalize_masks(net, masks), policy)


def simulate_parallel_mlp(
    net: Network,
    inputs,
    masks=None,
    cfg: SimConfig | None = None,
    policy: HalfPrecisionPolicy = F64,
) -> SimReport:
    cfg = cfg or SimConfig(mode=MODE_PARALLEL_MLP)
    if net.kind != "mlp":
        raise ModeError(f"parallel mode requires a pure-MLP network, got {net.kind}")
    acct, outputs = _simulate_mlp(net, inputs, masks, cfg, policy, sparse=True)
    baseline = simulate_baseline(net, inputs, cfg, policy)
    batch = np.asarray(inputs).shape[0]
    report = _finish_report(
        acct, MODE_PARALLEL_MLP, batch, cfg, outputs, baseline.total_cycles
    )
    return _functional_check(report, net, inputs, _normalize_masks(net, masks), policy)


def simulate(
    net: Network,
    inputs,
    masks=None,
    cfg: SimConfig | None = None,
    policy: HalfPrecisionPolicy = F64,
) -> SimReport:
    cfg = cfg or SimConfig()
    if cfg.mode == MODE_BASELINE:
        return simulate_baseline(net, inputs, cfg, policy)
    if cfg.mode == MODE_PIPELINE_KAN:
        return simulate_pipeline_kan(net, inputs, masks, cfg, policy)
    return simulate_parallel_mlp(net, inputs, masks, cfg, policy)


def count_operations(net: Network, counting: str = "dense") -> dict:
    """Analytic per-sample operation totals under the shared convention.

    MACs count multiply+accumulate as two arithmetic ops; basis evaluation
    uses the stage-buffer (with-reuse) recursion counts; SiLU costs
    SILU_OPS per input.  ``support_pruned`` replaces the dense per-edge
    basis MACs with the K+1 locally supported ones and prunes the
    recursion to its active nodes.
    """
    if counting not in ("dense", "support_pruned"):
        raise ValueError(f"unknown counting convention {counting!r}")
    macs = 0
    basis_ops = 0
    silu_ops = 0
    for layer in net.layers:
        if layer.kind == "mlp":
            macs += layer.n_in * layer.n_out
            continue
        nb = layer.spline.n_bases
        k = layer.spline.k
        if counting == "dense":
            macs += layer.n_in * (nb + 1) * layer.n_out
            basis_ops += layer.n_in * reuse_op_counts(layer.spline.g, k)[0]
        else:
            macs += layer.n_in * (k + 2) * layer.n_out
            pruned_nodes = sum(level + 1 for level in range(1, k + 1))
            basis_ops += layer.n_in * (7 * pruned_nodes + 2 * (k + 1))
        silu_ops += layer.n_in * SILU_OPS
    mac_ops = 2 * macs
    return {
        "macs": macs,
        "mac_ops": mac_ops,
        "basis_ops": basis_ops,
        "silu_ops": silu_ops,
        "total_ops": mac_ops + basis_ops + silu_ops,
    }


def mask_for_rate(rate: int) -> PatternMask:
    """Pattern mask for a structural sparsity rate in {0, 25, 50, 75} percent."""
    table = {0: "1111", 25: "1110", 50: "1010", 75: "1000"}
    if rate not in table:
        raise ValueError(f"unsupported pattern rate {rate}, expected one of {sorted(table)}")
    return PatternMask.from_string(table[rate])


@dataclass
class SweepTemplate:
    """Everything needed to rebuild (net, inputs, masks) per sweep point."""

    kind: str
    sizes: list[int]
    g: int = 4
    k: int = 3
    seed: int = 0
    batch: int = 64
    mask: PatternMask | None = None
    input_zero_fraction: float = 0.0
    weight_zero_fraction: float = 0.0
    domain: tuple[float, float] = (-1.0, 1.0)

    def build(self, parameter: str | None = None, value=None):
        g = self.g
        mask = self.mask
        input_zeros = self.input_zero_fraction
        if parameter == "G":
            g = int(value)
        elif parameter == "pattern_rate":
            mask = mask_for_rate(int(value))
        elif parameter == "zero_fraction":
            input_zeros = float(value)
        elif parameter is not None:
            raise ValueError(f"unknown sweep parameter {parameter!r}")
        net = synth_model(
            self.kind, list(self.sizes), g=g, k=self.k, seed=self.seed,
            zero_fraction=self.weight_zero_fraction, domain=self.domain,
        )
        inputs = synth_inputs(
            net.n_in, self.batch, seed=self.seed + 1,
            zero_fraction=input_zeros, domain=self.domain,
        )
        masks = [mask] * len(net.layers) if mask is not None else None
        return net, inputs, masks


def sweep(
    template: SweepTemplate,
    parameter: str,
    values,
    cfg: SimConfig | None = None,
    policy: HalfPrecisionPolicy = F64,
) -> list[SimReport]:
    """One report per value; the seed and the input batch stay constant."""
    cfg = cfg or SimConfig()
    reports = []
    for value in values:
        net, inputs, masks = template.build(parameter, value)
        reports.append(simulate(net, inputs, masks, cfg, policy))
    return reports
