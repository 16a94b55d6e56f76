"""Versioned binary model files with a JSON header and raw weight blocks.

Layout: magic ``VIKN`` | format version (u32 LE) | header length (u32 LE)
| UTF-8 JSON header | little-endian float64 weight blocks, one per
parameter array, in layer order (KAN: w_b then t; MLP: weight then bias).
Round trips are bit-exact.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .model import KanLayer, MlpLayer, Network
from .splines import build_knots

MAGIC = b"VIKN"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """Malformed model file (bad magic, truncation, broken header)."""


class ModelVersionError(ModelFormatError):
    """Format version or layer kind this reader does not understand."""


def _layer_header(layer) -> dict:
    if layer.kind == "kan":
        return {
            "type": "kan",
            "n_in": layer.n_in,
            "n_out": layer.n_out,
            "g": layer.spline.g,
            "k": layer.spline.k,
            "domain": [layer.spline.lo, layer.spline.hi],
        }
    return {
        "type": "mlp",
        "n_in": layer.n_in,
        "n_out": layer.n_out,
        "activation": layer.activation,
    }


def _layer_arrays(layer) -> list[np.ndarray]:
    if layer.kind == "kan":
        return [layer.w_b, layer.t]
    return [layer.weight, layer.bias]


def save_model(net: Network, path) -> None:
    header = {"kind": net.kind, "layers": [_layer_header(l) for l in net.layers]}
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    blob = bytearray()
    blob += MAGIC
    blob += struct.pack("<I", FORMAT_VERSION)
    blob += struct.pack("<I", len(header_bytes))
    blob += header_bytes
    for layer in net.layers:
        for arr in _layer_arrays(layer):
            blob += np.ascontiguousarray(arr, dtype="<f8").tobytes()
    Path(path).write_bytes(bytes(blob))


def _take(buf: bytes, offset: int, count: int, what: str) -> tuple[bytes, int]:
    if offset + count > len(buf):
        raise ModelFormatError(
            f"truncated model file: need {count} bytes for {what} at offset {offset}, "
            f"have {len(buf) - offset}"
        )
    return buf[offset : offset + count], offset + count


def load_model(path) -> Network:
    buf = Path(path).read_bytes()
    magic, offset = _take(buf, 0, 4, "magic")
    if magic != MAGIC:
        raise ModelFormatError(f"bad magic {magic!r} at offset 0, expected {MAGIC!r}")
    raw, offset = _take(buf, offset, 4, "format version")
    version = struct.unpack("<I", raw)[0]
    if version != FORMAT_VERSION:
        raise ModelVersionError(f"unsupported format version {version}, expected {FORMAT_VERSION}")
    raw, offset = _take(buf, offset, 4, "header length")
    header_len = struct.unpack("<I", raw)[0]
    raw, offset = _take(buf, offset, header_len, "JSON header")
    try:
        header = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise ModelFormatError(f"unreadable header at offset 12: {err}") from None

    layers = []
    for idx, spec in enumerate(header.get("layers", [])):
        kind = spec.get("type")
        if kind == "kan":
            spline = build_knots(spec["g"], spec["k"], tuple(spec["domain"]))
            shapes = [
                ("w_b", (spec["n_out"], spec["n_in"])),
                ("t", (spec["n_out"], spec["n_in"], spline.n_bases)),
            ]
        elif kind == "mlp":
            shapes = [
                ("weight", (spec["n_out"], spec["n_in"])),
                ("bias", (spec["n_out"],)),
            ]
        else:
            raise ModelVersionError(f"unknown layer kind tag {kind!r} in layer {idx}")
        arrays = {}
        for name, shape in shapes:
            nbytes = int(np.prod(shape)) * 8
            raw, offset = _take(buf, offset, nbytes, f"layer {idx} field {name}")
            arrays[name] = np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(shape)
        if kind == "kan":
            layers.append(
                KanLayer(
                    n_in=spec["n_in"],
                    n_out=spec["n_out"],
                    spline=spline,
                    w_b=arrays["w_b"],
                    t=arrays["t"],
                )
            )
        else:
            layers.append(
                MlpLayer(
                    n_in=spec["n_in"],
                    n_out=spec["n_out"],
                    weight=arrays["weight"],
                    bias=arrays["bias"],
                    activation=spec.get("activation", "none"),
                )
            )
    if offset != len(buf):
        raise ModelFormatError(f"{len(buf) - offset} trailing bytes at offset {offset}")
    return Network(layers=layers)
