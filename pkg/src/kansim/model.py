"""Network representation and golden-reference dense inference.

KAN layers keep the folded spline coefficients only (t = w_s * c); the
unfolded form exists just long enough for :func:`fold_weights`.  Forward
passes are pure, batch-vectorized, and deterministic; the optional
half-precision policy re-runs them with round-to-nearest-even applied to
every stored intermediate in a pinned accumulation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .splines import SplineConfig, basis_matrix, build_knots, silu


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class HalfPrecisionPolicy:
    """When enabled, every stored intermediate is rounded via FP16.

    numpy's float64 -> float16 conversion rounds to nearest, ties to even.
    Disabled policies leave the 64-bit reference path untouched.
    """

    enabled: bool = False

    def round(self, x):
        if not self.enabled:
            return x
        return np.asarray(x, dtype=np.float16).astype(np.float64)


F64 = HalfPrecisionPolicy(enabled=False)
F16 = HalfPrecisionPolicy(enabled=True)


@dataclass
class KanLayer:
    n_in: int
    n_out: int
    spline: SplineConfig
    w_b: np.ndarray   # [n_out, n_in] SiLU-path weights
    t: np.ndarray     # [n_out, n_in, g+k] folded spline coefficients

    def __post_init__(self):
        nb = self.spline.n_bases
        if self.w_b.shape != (self.n_out, self.n_in):
            raise ShapeError(
                f"w_b shape {self.w_b.shape} != expected {(self.n_out, self.n_in)}"
            )
        if self.t.shape != (self.n_out, self.n_in, nb):
            raise ShapeError(
                f"t shape {self.t.shape} != expected {(self.n_out, self.n_in, nb)}"
            )
        if not (np.isfinite(self.w_b).all() and np.isfinite(self.t).all()):
            raise ValueError("non-finite weights")

    @property
    def kind(self) -> str:
        return "kan"


@dataclass
class MlpLayer:
    n_in: int
    n_out: int
    weight: np.ndarray  # [n_out, n_in]
    bias: np.ndarray    # [n_out]
    activation: str = "relu"  # "relu" or "none"; final layers use "none"

    def __post_init__(self):
        if self.weight.shape != (self.n_out, self.n_in):
            raise ShapeError(
                f"weight shape {self.weight.shape} != expected {(self.n_out, self.n_in)}"
            )
        if self.bias.shape != (self.n_out,):
            raise ShapeError(f"bias shape {self.bias.shape} != expected {(self.n_out,)}")
        if self.activation not in ("relu", "none"):
            raise ValueError(f"unknown activation {self.activation!r}")
        if not (np.isfinite(self.weight).all() and np.isfinite(self.bias).all()):
            raise ValueError("non-finite weights")

    @property
    def kind(self) -> str:
        return "mlp"


@dataclass
class Network:
    layers: list

    def __post_init__(self):
        if not self.layers:
            raise ValueError("network needs at least one layer")
        kinds = {layer.kind for layer in self.layers}
        if len(kinds) != 1:
            raise ValueError("mixed KAN/MLP layer sequences are not supported")
        for i in range(len(self.layers) - 1):
            if self.layers[i].n_out != self.layers[i + 1].n_in:
                raise ShapeError(
                    f"layer {i} produces {self.layers[i].n_out} outputs but "
                    f"layer {i + 1} expects {self.layers[i + 1].n_in}"
                )

    @property
    def kind(self) -> str:
        return self.layers[0].kind

    @property
    def n_in(self) -> int:
        return self.layers[0].n_in

    @property
    def n_out(self) -> int:
        return self.layers[-1].n_out

    @property
    def sizes(self) -> list[int]:
        return [self.layers[0].n_in] + [layer.n_out for layer in self.layers]


def _check_input(n_in: int, x: np.ndarray, where: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != n_in:
        raise ShapeError(f"{where}: input width {x.shape[-1]} != expected {n_in}")
    return x


def kan_layer_forward(
    layer: KanLayer,
    x,
    policy: HalfPrecisionPolicy = F64,
    basis_keep: np.ndarray | None = None,
) -> np.ndarray:
    """out[q] = sum_p w_b[q,p]*silu(x_p) + sum_i t[q,p,i]*B_i(x_p).

    ``basis_keep`` optionally zeroes basis positions (the pattern-mask
    reference semantics) before the MAC stage.
    """
    x = _check_input(layer.n_in, x, "kan layer")
    squeeze = x.ndim == 1
    xb = np.atleast_2d(x)
    s, bmat = _kan_intermediates(layer, xb, policy)
    if basis_keep is not None:
        bmat = np.where(basis_keep, bmat, 0.0)
    if policy.enabled:
        out = _mac_sequential_kan(layer, s, bmat, policy)
    else:
        out = s @ layer.w_b.T + np.einsum("bpi,qpi->bq", bmat, layer.t)
    return out[0] if squeeze else out


def _kan_intermediates(layer, xb, policy):
    xb = policy.round(xb)
    s = policy.round(silu(xb))
    bmat = policy.round(basis_matrix(layer.spline, xb))
    return s, bmat


def _mac_sequential_kan(layer, s, bmat, policy):
    # Hardware-faithful worst case: round after every product and every
    # accumulate, input order p then i, the SiLU term closing each input.
    batch = s.shape[0]
    acc = np.zeros((batch, layer.n_out))
    for p in range(layer.n_in):
        for i in range(layer.spline.n_bases):
            prod = policy.round(bmat[:, p, i, None] * layer.t[:, p, i][None, :])
            acc = policy.round(acc + prod)
        prod = policy.round(s[:, p, None] * layer.w_b[:, p][None, :])
        acc = policy.round(acc + prod)
    return acc


def mlp_layer_forward(layer: MlpLayer, x, policy: HalfPrecisionPolicy = F64) -> np.ndarray:
    x = _check_input(layer.n_in, x, "mlp layer")
    squeeze = x.ndim == 1
    xb = np.atleast_2d(x)
    if policy.enabled:
        xb = policy.round(xb)
        acc = np.zeros((xb.shape[0], layer.n_out))
        for p in range(layer.n_in):
            prod = policy.round(xb[:, p, None] * layer.weight[:, p][None, :])
            acc = policy.round(acc + prod)
        out = policy.round(acc + policy.round(layer.bias)[None, :])
    else:
        out = xb @ layer.weight.T + layer.bias
    if layer.activation == "relu":
        out = np.maximum(out, 0.0)
    return out[0] if squeeze else out


def network_forward(
    net: Network,
    x,
    policy: HalfPrecisionPolicy = F64,
    masks: list | None = None,
) -> np.ndarray:
    """Left-to-right composition; per-layer masks apply the reference
    zeroing (KAN: basis positions, MLP: input activations)."""
    if masks is not None and len(masks) != len(net.layers):
        raise ValueError(f"expected {len(net.layers)} masks, got {len(masks)}")
    out = np.asarray(x, dtype=np.float64)
    for idx, layer in enumerate(net.layers):
        mask = masks[idx] if masks is not None else None
        try:
            if layer.kind == "kan":
                keep = None
                if mask is not None and mask.enabled:
                    keep = mask.keep_vector(layer.spline.n_bases)
                out = kan_layer_forward(layer, out, policy, basis_keep=keep)
            else:
                if mask is not None and mask.enabled:
                    keep = mask.keep_vector(layer.n_in)
                    out = np.where(keep, out, 0.0)
                out = mlp_layer_forward(layer, out, policy)
        except ShapeError as err:
            raise ShapeError(f"layer {idx}: {err}") from None
    return out


def as_equivalent_linear(layer: KanLayer):
    """Lower a KAN layer to (intermediate builder, weight matrix).

    Per input feature the intermediate vector holds the g+k basis values
    followed by the SiLU value, so the layer is one linear map of width
    n_in * (g+k+1).
    """
    nb = layer.spline.n_bases
    width = layer.n_in * (nb + 1)

    def intermediates(x: np.ndarray) -> np.ndarray:
        x = _check_input(layer.n_in, x, "equivalent linear")
        bmat = basis_matrix(layer.spline, x)
        s = silu(x)
        parts = np.concatenate([bmat, s[..., np.newaxis]], axis=-1)
        return parts.reshape(x.shape[:-1] + (width,))

    matrix = np.zeros((layer.n_out, width))
    for p in range(layer.n_in):
        col = p * (nb + 1)
        matrix[:, col : col + nb] = layer.t[:, p, :]
        matrix[:, col + nb] = layer.w_b[:, p]
    return intermediates, matrix


def fold_weights(w_s, c) -> np.ndarray:
    """t_i = w_s * c_i (per-edge scalar against per-edge coefficient rows)."""
    w_s = np.asarray(w_s, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if w_s.ndim == c.ndim - 1:
        w_s = w_s[..., np.newaxis]
    try:
        return w_s * c
    except ValueError:
        raise ShapeError(f"cannot broadcast w_s {w_s.shape} against c {c.shape}") from None


def _zero_exact_fraction(rng: np.random.Generator, arr: np.ndarray, fraction: float) -> np.ndarray:
    # Exactly round(fraction * size) zeros, positions drawn without replacement.
    n_zero = int(round(fraction * arr.size))
    if n_zero == 0:
        return arr
    flat = arr.reshape(-1)
    flat[rng.permutation(arr.size)[:n_zero]] = 0.0
    return arr


def synth_model(
    kind: str,
    sizes: list[int],
    g: int = 4,
    k: int = 3,
    seed: int = 0,
    zero_fraction: float = 0.0,
    domain: tuple[float, float] = (-1.0, 1.0),
) -> Network:
    """Deterministic seeded stand-in for a trained network.

    ``zero_fraction`` of each parameter array is exactly zero (positions
    seeded), which is what the sparsity experiments sweep.
    """
    if kind not in ("kan", "mlp"):
        raise ValueError(f"unknown network kind {kind!r}")
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise ValueError(f"invalid layer sizes {sizes}")
    if not 0.0 <= zero_fraction <= 1.0:
        raise ValueError(f"zero_fraction {zero_fraction} outside [0, 1]")
    rng = np.random.default_rng(seed)
    layers = []
    for idx, (n_in, n_out) in enumerate(zip(sizes, sizes[1:])):
        last = idx == len(sizes) - 2
        if kind == "kan":
            spline = build_knots(g, k, domain)
            w_b = rng.normal(0.0, 1.0 / np.sqrt(n_in), size=(n_out, n_in))
            t = rng.normal(
                0.0, 1.0 / np.sqrt(n_in * spline.n_bases), size=(n_out, n_in, spline.n_bases)
            )
            w_b = _zero_exact_fraction(rng, w_b, zero_fraction)
            t = _zero_exact_fraction(rng, t, zero_fraction)
            layers.append(KanLayer(n_in=n_in, n_out=n_out, spline=spline, w_b=w_b, t=t))
        else:
            weight = rng.normal(0.0, 1.0 / np.sqrt(n_in), size=(n_out, n_in))
            bias = rng.normal(0.0, 0.1, size=n_out)
            weight = _zero_exact_fraction(rng, weight, zero_fraction)
            bias = _zero_exact_fraction(rng, bias, zero_fraction)
            layers.append(
                MlpLayer(
                    n_in=n_in,
                    n_out=n_out,
                    weight=weight,
                    bias=bias,
                    activation="none" if last else "relu",
                )
            )
    return Network(layers=layers)


def synth_inputs(
    n_in: int,
    batch: int,
    seed: int = 0,
    zero_fraction: float = 0.0,
    domain: tuple[float, float] = (-1.0, 1.0),
) -> np.ndarray:
    """Seeded input batch; zeroed positions nest as zero_fraction grows."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(domain[0], domain[1], size=(batch, n_in))
    if zero_fraction > 0.0:
        n_zero = int(round(zero_fraction * n_in))
        perms = np.argsort(rng.random((batch, n_in)), axis=1)
        for s in range(batch):
            x[s, perms[s, :n_zero]] = 0.0
    return x
