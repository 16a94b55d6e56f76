"""kansim: KAN/MLP inference reference plus a cycle-approximate model of a
sparsity-aware spline accelerator."""

__version__ = "0.1.0"

from .model import (
    F16,
    F64,
    HalfPrecisionPolicy,
    KanLayer,
    MlpLayer,
    Network,
    ShapeError,
    as_equivalent_linear,
    fold_weights,
    kan_layer_forward,
    mlp_layer_forward,
    network_forward,
    synth_inputs,
    synth_model,
)
from .modelio import ModelFormatError, ModelVersionError, load_model, save_model
from .sim import (
    ModeError,
    SimConfig,
    SimReport,
    SimulationError,
    SweepTemplate,
    WeightBufferScheme,
    count_operations,
    mask_for_rate,
    simulate,
    simulate_baseline,
    simulate_parallel_mlp,
    simulate_pipeline_kan,
    sweep,
    weight_buffer_scheme,
)
from .sparsity import (
    PatternMask,
    SparsityStats,
    ZeroFreeSlice,
    ZeroFreeStream,
    apply_pattern_mask,
    decode_zero_free,
    encode_zero_free,
    gather_weights,
    two_stage_filter,
)
from .splines import (
    BasisVector,
    ConfigError,
    SplineConfig,
    StageBuffer,
    basis_matrix,
    build_knots,
    eval_basis,
    eval_basis_with_reuse,
    eval_basis_zero,
    reciprocal_div_free,
    silu,
)

__all__ = [
    "__version__",
    "BasisVector", "ConfigError", "SplineConfig", "StageBuffer",
    "basis_matrix", "build_knots", "eval_basis", "eval_basis_with_reuse",
    "eval_basis_zero", "reciprocal_div_free", "silu",
    "F16", "F64", "HalfPrecisionPolicy", "KanLayer", "MlpLayer", "Network",
    "ShapeError", "as_equivalent_linear", "fold_weights", "kan_layer_forward",
    "mlp_layer_forward", "network_forward", "synth_inputs", "synth_model",
    "ModelFormatError", "ModelVersionError", "load_model", "save_model",
    "PatternMask", "SparsityStats", "ZeroFreeSlice", "ZeroFreeStream",
    "apply_pattern_mask", "decode_zero_free", "encode_zero_free",
    "gather_weights", "two_stage_filter",
    "ModeError", "SimConfig", "SimReport", "SimulationError", "SweepTemplate",
    "WeightBufferScheme", "count_operations", "mask_for_rate", "simulate",
    "simulate_baseline", "simulate_parallel_mlp", "simulate_pipeline_kan",
    "sweep", "weight_buffer_scheme",
]
