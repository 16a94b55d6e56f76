import struct

import numpy as np
import pytest

from kansim.model import synth_model, network_forward
from kansim.modelio import (
    FORMAT_VERSION,
    MAGIC,
    ModelFormatError,
    ModelVersionError,
    load_model,
    save_model,
)


def test_roundtrip_bit_exact(tmp_path):
    for kind, sizes in [("kan", [3, 5, 2]), ("mlp", [4, 6, 3])]:
        net = synth_model(kind, sizes, seed=31)
        path = tmp_path / f"{kind}.vikn"
        save_model(net, path)
        back = load_model(path)
        x = np.random.default_rng(1).uniform(-1, 1, (3, sizes[0]))
        assert np.array_equal(network_forward(net, x), network_forward(back, x))
        save_model(back, tmp_path / "again.vikn")
        assert path.read_bytes() == (tmp_path / "again.vikn").read_bytes()


def test_magic_and_version_in_header(tmp_path):
    net = synth_model("mlp", [2, 2], seed=1)
    path = tmp_path / "m.vikn"
    save_model(net, path)
    blob = path.read_bytes()
    assert blob[:4] == MAGIC
    assert struct.unpack("<I", blob[4:8])[0] == FORMAT_VERSION


def test_truncated_file_rejected(tmp_path):
    net = synth_model("kan", [3, 2], seed=2)
    path = tmp_path / "t.vikn"
    save_model(net, path)
    blob = path.read_bytes()
    (tmp_path / "cut.vikn").write_bytes(blob[: len(blob) - 16])
    with pytest.raises(ModelFormatError, match="truncated"):
        load_model(tmp_path / "cut.vikn")


def test_bad_magic_rejected(tmp_path):
    (tmp_path / "bad.vikn").write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(ModelFormatError, match="magic"):
        load_model(tmp_path / "bad.vikn")


def test_version_mismatch_rejected(tmp_path):
    net = synth_model("mlp", [2, 2], seed=3)
    path = tmp_path / "v.vikn"
    save_model(net, path)
    blob = bytearray(path.read_bytes())
    blob[4:8] = struct.pack("<I", 99)
    (tmp_path / "v99.vikn").write_bytes(bytes(blob))
    with pytest.raises(ModelVersionError, match="version"):
        load_model(tmp_path / "v99.vikn")


def test_unknown_layer_kind_rejected(tmp_path):
    net = synth_model("mlp", [2, 2], seed=4)
    path = tmp_path / "k.vikn"
    save_model(net, path)
    blob = path.read_bytes()
    hacked = blob.replace(b'"type": "mlp"', b'"type": "gru"')
    (tmp_path / "gru.vikn").write_bytes(hacked)
    with pytest.raises(ModelVersionError, match="unknown layer kind"):
        load_model(tmp_path / "gru.vikn")


def test_trailing_bytes_rejected(tmp_path):
    net = synth_model("mlp", [2, 2], seed=5)
    path = tmp_path / "x.vikn"
    save_model(net, path)
    (tmp_path / "pad.vikn").write_bytes(path.read_bytes() + b"\x00" * 8)
    with pytest.raises(ModelFormatError, match="trailing"):
        load_model(tmp_path / "pad.vikn")
