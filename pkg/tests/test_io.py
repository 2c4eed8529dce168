import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from procgraph.errors import MalformedFile
from procgraph.graph import graph_to_json
from procgraph.io import (
    decode_pfm,
    depth_preview,
    encode_pfm,
    linear_to_srgb,
    normal_preview,
    read_graph,
    read_pfm,
    to_uint8,
    write_graph,
    write_obj,
    write_pfm,
    write_png,
)
from procgraph.materials.samplers import LIBRARY
from procgraph.mesh import make_grid
from procgraph.sampler import sample

finite_f32 = st.floats(allow_nan=False, width=32)


@settings(max_examples=40)
@given(st.integers(1, 9), st.integers(1, 9), st.booleans(), st.data())
def test_pfm_round_trip(h, w, color, data):
    shape = (h, w, 3) if color else (h, w)
    vals = data.draw(st.lists(finite_f32, min_size=int(np.prod(shape)), max_size=int(np.prod(shape))))
    img = np.array(vals, dtype=np.float32).reshape(shape)
    back = decode_pfm(encode_pfm(img))
    assert back.shape == shape and back.dtype == np.float32
    assert back.tobytes() == img.tobytes()


def test_pfm_header_and_row_order(tmp_path):
    img = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=np.float32)
    buf = encode_pfm(img)
    assert buf.startswith(b"Pf\n2 2\n-1.0\n")
    # bottom row first
    assert struct.unpack("<4f", buf[-16:]) == (3.0, 4.0, 1.0, 2.0)
    write_pfm(tmp_path / "a.pfm", img)
    assert np.array_equal(read_pfm(tmp_path / "a.pfm"), img)


def test_pfm_keeps_infinities():
    img = np.array([[np.inf, 0.5]], dtype=np.float32)
    assert np.array_equal(decode_pfm(encode_pfm(img)), img)


def test_big_endian_decode():
    vals = [1.5, -2.0, 3.25]
    buf = b"PF\n1 1\n1.0\n" + struct.pack(">3f", *vals)
    assert decode_pfm(buf).tolist() == [[vals]]


def test_bad_shape_rejected():
    with pytest.raises(ValueError):
        encode_pfm(np.zeros((2, 2, 4)))


@pytest.mark.parametrize(
    "buf,offset",
    [
        (b"", 0),
        (b"XX\n1 1\n-1.0\n" + bytes(4), 0),
        (b"Pq\n1 1\n-1.0\n" + bytes(4), 2),
        (b"Pf\n1 1\n0.0\n" + bytes(4), 7),
        (b"Pf\n2 2\n-1.0\n" + bytes(15), 27),
        (b"Pf\n1 1\n-1.0\n" + bytes(5), 16),
        (b"Pf\n1 1\n-.-\n" + bytes(4), 7),
    ],
)
def test_malformed_pfm(buf, offset):
    with pytest.raises(MalformedFile) as e:
        decode_pfm(buf)
    assert e.value.offset == offset


@settings(max_examples=300)
@given(st.binary(max_size=64))
def test_pfm_fuzz_random_bytes(buf):
    try:
        decode_pfm(buf)
    except MalformedFile:
        pass


@settings(max_examples=200)
@given(st.integers(0, 40), st.integers(0, 255), st.integers(1, 47))
def test_pfm_fuzz_corrupted(pos, byte, cut):
    good = encode_pfm(np.arange(6, dtype=np.float32).reshape(2, 3))
    bad = bytearray(good)
    bad[pos % len(bad)] = byte
    for candidate in (bytes(bad), good[:-cut], good + bytes(cut)):
        try:
            out = decode_pfm(candidate)
        except MalformedFile:
            continue
        assert out.dtype == np.float32


@pytest.mark.parametrize("f", LIBRARY[:12], ids=lambda f: f.id)
def test_graph_json_round_trip(f, tmp_path):
    graph = sample(f, 4)
    write_graph(tmp_path / "g.json", graph)
    back = read_graph(tmp_path / "g.json")
    assert back == graph
    assert graph_to_json(back) == graph_to_json(graph)


def test_read_graph_errors(tmp_path):
    p = tmp_path / "g.json"
    p.write_bytes(b'{"nodes": [')
    with pytest.raises(MalformedFile):
        read_graph(p)
    p.write_bytes(b'{"nodes": 3}')
    with pytest.raises(MalformedFile):
        read_graph(p)
    p.write_bytes(b"\xff\xfe")
    with pytest.raises(MalformedFile):
        read_graph(p)


def test_srgb_curve():
    assert linear_to_srgb(0.0) == 0.0 and linear_to_srgb(1.0) == pytest.approx(1.0, abs=1e-12)
    assert linear_to_srgb(0.002) == pytest.approx(0.02584, abs=1e-12)
    assert linear_to_srgb(0.18) == pytest.approx(0.4613561295, abs=1e-9)
    x = np.linspace(0, 1, 101)
    assert np.all(np.diff(linear_to_srgb(x)) > 0)
    assert to_uint8(np.array([-1.0, 0.5, 2.0]), srgb=False).tolist() == [0, 128, 255]


def test_write_png_reads_back(tmp_path):
    img = np.linspace(0, 1, 4 * 5 * 3).reshape(4, 5, 3)
    write_png(tmp_path / "a.png", img, srgb=False)
    back = np.asarray(Image.open(tmp_path / "a.png"))
    assert back.shape == (4, 5, 3)
    assert np.array_equal(back, to_uint8(img, srgb=False))


def test_previews():
    d = depth_preview(np.array([[1.0, 3.0, np.inf]]))
    assert d.tolist() == [[1.0, pytest.approx(0.2), 0.0]]
    n = normal_preview(np.array([[[0.0, 0.0, -1.0], [0.0, 0.0, 0.0]]]))
    assert n.tolist() == [[[0.5, 0.5, 0.0], [0.0, 0.0, 0.0]]]


def test_write_obj(tmp_path):
    write_obj(tmp_path / "m.obj", make_grid(1, 1))
    lines = (tmp_path / "m.obj").read_text().splitlines()
    assert sum(ln.startswith("v ") for ln in lines) == 4
    assert lines[-1].startswith("f ")
