"""Self-contained property suite behind the ``verify`` subcommand.

Each property re-derives its expectation independently of the code path it
checks (textbook recursion, brute-force counting, round trips), prints one
verdict per property, and the whole suite is sensitive enough that a
single flipped basis sign fails it (exposed through the test-only fault
hook).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import model, modelio, sim, sparsity, splines


@dataclass
class PropertyResult:
    name: str
    passed: bool
    detail: str = ""


def _naive_basis(knots: np.ndarray, k: int, i: int, x: float) -> float:
    # Textbook two-term recursion, no caching, no division elimination.
    if k == 0:
        return 1.0 if knots[i] <= x < knots[i + 1] else 0.0
    left = 0.0
    if knots[i + k] != knots[i]:
        left = (x - knots[i]) / (knots[i + k] - knots[i]) * _naive_basis(knots, k - 1, i, x)
    right = 0.0
    if knots[i + k + 1] != knots[i + 1]:
        right = (
            (knots[i + k + 1] - x)
            / (knots[i + k + 1] - knots[i + 1])
            * _naive_basis(knots, k - 1, i + 1, x)
        )
    return left + right


def _basis_fn(cfg, x, fault):
    values = splines.eval_basis(cfg, x).values.copy()
    if fault == "flip-basis-sign":
        nz = np.nonzero(values)[0]
        if nz.size:
            values[nz[0]] = -values[nz[0]]
    return values


def _all_configs():
    for g in splines.SUPPORTED_GRID_SIZES:
        for k in splines.SUPPORTED_ORDERS:
            yield splines.build_knots(g, k)


def check_partition_of_unity(fault=None, samples=10_000) -> PropertyResult:
    rng = np.random.default_rng(11)
    worst = 0.0
    for cfg in _all_configs():
        xs = rng.uniform(cfg.lo, cfg.hi, size=samples)
        if fault is None:
            sums = splines.basis_matrix(cfg, xs).sum(axis=-1)
        else:
            sums = np.array([_basis_fn(cfg, x, fault).sum() for x in xs[:200]])
        worst = max(worst, float(np.abs(sums - 1.0).max()))
    return PropertyResult(
        "partition_of_unity", worst <= 1e-12, f"max |sum-1| = {worst:.3e}"
    )


def check_non_negative(fault=None, samples=2_000) -> PropertyResult:
    rng = np.random.default_rng(12)
    low = 0.0
    for cfg in _all_configs():
        for x in rng.uniform(cfg.lo, cfg.hi, size=max(8, samples // 16)):
            low = min(low, float(_basis_fn(cfg, float(x), fault).min()))
    return PropertyResult("basis_non_negative", low >= 0.0, f"min value = {low:.3e}")


def check_local_support(fault=None, samples=2_000) -> PropertyResult:
    rng = np.random.default_rng(13)
    ok = True
    detail = ""
    for cfg in _all_configs():
        xs = rng.uniform(cfg.lo, cfg.hi, size=max(8, samples // 16))
        counts = np.count_nonzero(splines.basis_matrix(cfg, xs), axis=-1)
        if counts.max() > cfg.k + 1:
            ok = False
            detail = f"(g={cfg.g}, k={cfg.k}) had {counts.max()} nonzero bases"
            break
    return PropertyResult("local_support_k_plus_1", ok, detail)


def check_matches_naive_recursion(fault=None, samples=625) -> PropertyResult:
    # 16 (g, k) configurations x 625 inputs = 1e4 random (config, x) pairs
    rng = np.random.default_rng(14)
    worst = 0.0
    for cfg in _all_configs():
        n = samples if fault is None else 25
        for x in rng.uniform(cfg.lo, cfg.hi, size=n):
            got = _basis_fn(cfg, float(x), fault)
            want = np.array(
                [_naive_basis(cfg.knots, cfg.k, i, float(x)) for i in range(cfg.n_bases)]
            )
            worst = max(worst, float(np.abs(got - want).max()))
    # identical expression tree: bitwise match expected, <= 1 ulp allowed
    return PropertyResult(
        "matches_naive_recursion", worst <= np.finfo(float).eps, f"max |diff| = {worst:.3e}"
    )


def check_reciprocal_exact(fault=None) -> PropertyResult:
    ok = True
    detail = ""
    for g in splines.SUPPORTED_GRID_SIZES:
        h = 2.0 / g
        for m in (1, 2, 3, 4):
            r = splines.reciprocal_div_free(m, h)
            if r != 1.0 / (m * h) or r * (m * h) != 1.0:
                ok = False
                detail = f"m={m}, h={h}: got {r!r}"
    return PropertyResult("division_free_reciprocal_exact", ok, detail)


def check_reuse_counts(fault=None) -> PropertyResult:
    rng = np.random.default_rng(15)
    for cfg in _all_configs():
        x = float(rng.uniform(cfg.lo, cfg.hi))
        bv, with_reuse, without_reuse = splines.eval_basis_with_reuse(cfg, x)
        if not np.array_equal(bv.values, splines.eval_basis(cfg, x).values):
            return PropertyResult("difference_reuse", False, "values diverge from eval_basis")
        if with_reuse >= without_reuse:
            return PropertyResult(
                "difference_reuse", False, f"no saving at g={cfg.g}, k={cfg.k}"
            )
    savings = [
        1.0 - splines.reuse_op_counts(g, 3)[0] / splines.reuse_op_counts(g, 3)[1]
        for g in splines.SUPPORTED_GRID_SIZES
    ]
    mean = float(np.mean(savings))
    return PropertyResult(
        "difference_reuse", 0.14 <= mean <= 0.28, f"mean k=3 saving = {mean:.3f}"
    )


def check_zero_free_roundtrip(fault=None, samples=10_000) -> PropertyResult:
    rng = np.random.default_rng(16)
    values = rng.normal(size=samples)
    values[rng.random(samples) < 0.4] = 0.0
    slc = sparsity.encode_zero_free(values, slice_id=3)
    ok = (
        np.array_equal(slc.decode(), values)
        and np.all(np.diff(slc.offsets) > 0)
        and len(slc.values) <= samples
        and np.all(slc.values != 0.0)
    )
    return PropertyResult("zero_free_roundtrip", bool(ok), f"{len(slc.values)} pairs kept")


def check_mask_semantics(fault=None) -> PropertyResult:
    mask = sparsity.PatternMask.from_string("1010")
    got = sparsity.apply_pattern_mask([1.0, 2.0, 3.0, 4.0], mask)
    if not np.array_equal(got, [1.0, 0.0, 3.0, 0.0]):
        return PropertyResult("pattern_mask_semantics", False, f"worked example gave {got}")
    # neutrality: already-zero masked positions leave the vector untouched
    vec = np.array([0.5, 0.0, -1.0, 0.0, 2.0, 0.0, 3.0, 0.0])
    if not np.array_equal(sparsity.apply_pattern_mask(vec, mask), vec):
        return PropertyResult("pattern_mask_semantics", False, "mask neutrality violated")
    disabled = sparsity.PatternMask.from_string("1000", enabled=False)
    vec2 = np.arange(1.0, 9.0)
    ok = np.array_equal(sparsity.apply_pattern_mask(vec2, disabled), vec2)
    return PropertyResult("pattern_mask_semantics", bool(ok), "")


def _random_case(rng, kind):
    sizes = [int(rng.integers(2, 7)) for _ in range(int(rng.integers(2, 4)) + 1)]
    g = int(rng.choice(splines.SUPPORTED_GRID_SIZES))
    k = int(rng.choice(splines.SUPPORTED_ORDERS))
    net = model.synth_model(kind, sizes, g=g, k=k, seed=int(rng.integers(1 << 30)))
    inputs = model.synth_inputs(net.n_in, batch=int(rng.integers(1, 5)),
                                seed=int(rng.integers(1 << 30)))
    mask = sim.mask_for_rate(int(rng.choice([0, 25, 50, 75])))
    return net, inputs, mask


def check_sparse_equals_dense(fault=None, cases=100) -> PropertyResult:
    rng = np.random.default_rng(17)
    for case in range(cases):
        kind = "kan" if case % 2 == 0 else "mlp"
        net, inputs, mask = _random_case(rng, kind)
        masks = [mask] * len(net.layers)
        report = sim.simulate(
            net, inputs, masks,
            sim.SimConfig(mode=sim.MODE_PIPELINE_KAN if kind == "kan" else sim.MODE_PARALLEL_MLP),
        )
        want = model.network_forward(net, inputs, masks=masks)
        if not np.array_equal(report.outputs, want):
            return PropertyResult(
                "sparse_equals_dense", False, f"mismatch on case {case} ({kind})"
            )
    return PropertyResult("sparse_equals_dense", True, f"{cases} random nets bit-equal")


def check_mac_conservation(fault=None, cases=24) -> PropertyResult:
    rng = np.random.default_rng(18)
    for case in range(cases):
        kind = "kan" if case % 2 == 0 else "mlp"
        net, inputs, mask = _random_case(rng, kind)
        report = sim.simulate(
            net, inputs, [mask] * len(net.layers),
            sim.SimConfig(mode=sim.MODE_PIPELINE_KAN if kind == "kan" else sim.MODE_PARALLEL_MLP),
        )
        if report.pe_macs + report.skipped_pe_macs != report.dense_pe_macs:
            return PropertyResult("mac_conservation", False, f"case {case}")
    return PropertyResult("mac_conservation", True, f"{cases} reports balanced")


def _nested_masks(rng) -> list:
    # progressively drop positions, keeping the kept sets nested
    order = rng.permutation(4)
    bits = [True, True, True, True]
    masks = [sparsity.PatternMask(tuple(bits))]
    for pos in order[:3]:
        bits[pos] = False
        masks.append(sparsity.PatternMask(tuple(bits)))
    return masks


def check_cycle_monotonicity(fault=None, ladders=20) -> PropertyResult:
    # Ladders where per-layer stream shrinkage is guaranteed to compose:
    # order-3 KANs (the mask batch tiles the K+1 support window, so
    # survivors per feature equal the mask popcount regardless of where the
    # window lands) and single-layer MLPs (no data-dependent downstream
    # activations).
    rng = np.random.default_rng(19)
    for ladder in range(ladders):
        if ladder % 2 == 0:
            sizes = [int(rng.integers(2, 7)) for _ in range(int(rng.integers(2, 4)) + 1)]
            g = int(rng.choice(splines.SUPPORTED_GRID_SIZES))
            net = model.synth_model("kan", sizes, g=g, k=3, seed=int(rng.integers(1 << 30)))
            cfg = sim.SimConfig(mode=sim.MODE_PIPELINE_KAN)
        else:
            sizes = [int(rng.integers(2, 40)), int(rng.integers(2, 40))]
            net = model.synth_model("mlp", sizes, seed=int(rng.integers(1 << 30)))
            cfg = sim.SimConfig(mode=sim.MODE_PARALLEL_MLP)
        inputs = model.synth_inputs(net.n_in, 4, seed=int(rng.integers(1 << 30)))
        prev = None
        for mask in _nested_masks(rng):
            cycles = sim.simulate(net, inputs, [mask] * len(net.layers), cfg).total_cycles
            if prev is not None and cycles > prev:
                return PropertyResult(
                    "cycle_monotonicity", False, f"mask ladder {ladder}: {cycles} > {prev}"
                )
            prev = cycles
        if net.kind == "mlp":
            prev = None
            for frac in (0.0, 0.25, 0.5, 0.75):
                zin = model.synth_inputs(net.n_in, 4, seed=5, zero_fraction=frac)
                cycles = sim.simulate(net, zin, None, cfg).total_cycles
                if prev is not None and cycles > prev:
                    return PropertyResult(
                        "cycle_monotonicity", False, f"zero ladder {ladder}"
                    )
                prev = cycles
    return PropertyResult("cycle_monotonicity", True, f"{ladders} ladders non-increasing")


def check_baseline_dominance(fault=None, cases=24) -> PropertyResult:
    rng = np.random.default_rng(20)
    worst = math.inf
    for case in range(cases):
        kind = "kan" if case % 2 == 0 else "mlp"
        net, inputs, mask = _random_case(rng, kind)
        report = sim.simulate(
            net, inputs, [mask] * len(net.layers),
            sim.SimConfig(mode=sim.MODE_PIPELINE_KAN if kind == "kan" else sim.MODE_PARALLEL_MLP),
        )
        worst = min(worst, report.speedup_vs_baseline)
    return PropertyResult(
        "baseline_dominance", worst >= 1.0 - 0.05, f"min speedup = {worst:.3f}"
    )


def check_model_roundtrip(fault=None, tmpdir=None) -> PropertyResult:
    import tempfile
    from pathlib import Path

    rng = np.random.default_rng(21)
    with tempfile.TemporaryDirectory() as tmp:
        for case in range(6):
            kind = "kan" if case % 2 == 0 else "mlp"
            net, _, _ = _random_case(rng, kind)
            path = Path(tmp) / f"net{case}.vikn"
            modelio.save_model(net, path)
            back = modelio.load_model(path)
            for a, b in zip(net.layers, back.layers):
                arrays_a = [a.w_b, a.t] if a.kind == "kan" else [a.weight, a.bias]
                arrays_b = [b.w_b, b.t] if b.kind == "kan" else [b.weight, b.bias]
                for arr_a, arr_b in zip(arrays_a, arrays_b):
                    if arr_a.tobytes() != arr_b.tobytes():
                        return PropertyResult("model_file_roundtrip", False, f"case {case}")
            second = Path(tmp) / f"net{case}b.vikn"
            modelio.save_model(back, second)
            if path.read_bytes() != second.read_bytes():
                return PropertyResult("model_file_roundtrip", False, "re-save differs")
    return PropertyResult("model_file_roundtrip", True, "6 round trips bit-exact")


def check_fold_equivalence(fault=None, cases=20) -> PropertyResult:
    rng = np.random.default_rng(22)
    worst = 0.0
    for _ in range(cases):
        cfg = splines.build_knots(4, 3)
        n_out, n_in = 3, 2
        w_s = rng.normal(size=(n_out, n_in))
        c = rng.normal(size=(n_out, n_in, cfg.n_bases))
        t = model.fold_weights(w_s, c)
        x = rng.uniform(-1, 1, size=n_in)
        bmat = splines.basis_matrix(cfg, x)
        two_step = np.einsum("qp,qpi,pi->q", w_s, c, bmat)
        folded = np.einsum("qpi,pi->q", t, bmat)
        worst = max(worst, float(np.abs(two_step - folded).max()))
    return PropertyResult("weight_fold_equivalence", worst <= 1e-15, f"max diff {worst:.2e}")


def check_equivalent_linear(fault=None, cases=10) -> PropertyResult:
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(cases):
        net = model.synth_model("kan", [2, 3], g=4, k=3, seed=int(rng.integers(1 << 30)))
        layer = net.layers[0]
        build, matrix = model.as_equivalent_linear(layer)
        for _ in range(10):
            x = rng.uniform(-1, 1, size=2)
            direct = model.kan_layer_forward(layer, x)
            lowered = matrix @ build(x)
            worst = max(worst, float(np.abs(direct - lowered).max()))
    return PropertyResult("equivalent_linear_fidelity", worst <= 1e-12, f"max diff {worst:.2e}")


def check_pipeline_plateau(fault=None) -> PropertyResult:
    # once stage 2 undercuts stage 1, more masking cannot reduce latency
    net = model.synth_model("kan", [72, 16], g=4, k=3, seed=3)
    inputs = model.synth_inputs(72, 16, seed=4)
    cfg = sim.SimConfig(mode=sim.MODE_PIPELINE_KAN)
    r50 = sim.simulate(net, inputs, [sim.mask_for_rate(50)], cfg)
    r75 = sim.simulate(net, inputs, [sim.mask_for_rate(75)], cfg)
    plateaued = r50.total_cycles == r75.total_cycles
    fewer_macs = r75.pe_macs < r50.pe_macs
    return PropertyResult(
        "pipeline_plateau",
        plateaued and fewer_macs,
        f"cycles {r50.total_cycles} vs {r75.total_cycles}, macs {r50.pe_macs} vs {r75.pe_macs}",
    )


ALL_CHECKS = (
    check_partition_of_unity,
    check_non_negative,
    check_local_support,
    check_matches_naive_recursion,
    check_reciprocal_exact,
    check_reuse_counts,
    check_zero_free_roundtrip,
    check_mask_semantics,
    check_sparse_equals_dense,
    check_mac_conservation,
    check_cycle_monotonicity,
    check_baseline_dominance,
    check_model_roundtrip,
    check_fold_equivalence,
    check_equivalent_linear,
    check_pipeline_plateau,
)


def run_property_suite(fault: str | None = None) -> list[PropertyResult]:
    """Run every property; ``fault`` is the test-only corruption hook."""
    return [check(fault=fault) for check in ALL_CHECKS]
