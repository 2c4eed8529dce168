"""File formats: PFM, PNG previews, OBJ and graph JSON."""

from __future__ import annotations

import json
import re

import numpy as np

from .errors import MalformedFile
from .graph import Graph, graph_from_json, graph_to_json
from .mesh import Mesh, to_obj

# exactly one whitespace byte ends the header; data bytes may look like whitespace
_PFM_HEADER = re.compile(rb"(P[Ff])\s+(\d+)\s+(\d+)\s+([-+0-9.eE]+)\s")


# PFM


def encode_pfm(image) -> bytes:
    """``Pf`` for (h, w), ``PF`` for (h, w, 3); little-endian float32, rows stored bottom to top."""
    img = np.asarray(image)
    if img.ndim == 2:
        tag = b"Pf"
    elif img.ndim == 3 and img.shape[2] == 3:
        tag = b"PF"
    else:
        raise ValueError(f"PFM needs an (h, w) or (h, w, 3) image, got shape {img.shape}")
    h, w = img.shape[:2]
    header = tag + b"\n" + f"{w} {h}\n-1.0\n".encode()
    data = np.ascontiguousarray(img[::-1], dtype="<f4")
    return header + data.tobytes()


def decode_pfm(buf: bytes) -> np.ndarray:
    m = _PFM_HEADER.match(buf)
    if m is None:
        # find how far the header got for a useful offset
        offset = 0 if not buf.startswith(b"P") else min(len(buf), 2)
        raise MalformedFile("bad PFM header", offset)
    tag, w, h, scale = m.group(1), int(m.group(2)), int(m.group(3)), m.group(4)
    try:
        scale = float(scale)
    except ValueError:
        raise MalformedFile("bad PFM scale", m.start(4)) from None
    if scale == 0:
        raise MalformedFile("PFM scale must be non-zero", m.start(4))
    channels = 3 if tag == b"PF" else 1
    dtype = "<f4" if scale < 0 else ">f4"
    start = m.end()
    need = w * h * channels * 4
    if len(buf) - start < need:
        raise MalformedFile(f"PFM data truncated: need {need} bytes, have {len(buf) - start}", len(buf))
    if len(buf) - start > need:
        raise MalformedFile("trailing bytes after PFM data", start + need)
    data = np.frombuffer(buf, dtype=dtype, count=w * h * channels, offset=start).astype("<f4")
    shape = (h, w, 3) if channels == 3 else (h, w)
    return data.reshape(shape)[::-1].copy()


def write_pfm(path, image) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_pfm(image))


def read_pfm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_pfm(fh.read())


# PNG


def linear_to_srgb(x) -> np.ndarray:
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    return np.where(x <= 0.0031308, 12.92 * x, 1.055 * np.power(x, 1.0 / 2.4) - 0.055)


def to_uint8(x, srgb: bool = True) -> np.ndarray:
    x = linear_to_srgb(x) if srgb else np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    return np.round(x * 255.0).astype(np.uint8)


def depth_preview(depth) -> np.ndarray:
    """Near = bright; misses black. Values in [0, 1], not gamma encoded."""
    d = np.asarray(depth, dtype=np.float64)
    ok = np.isfinite(d)
    if not ok.any():
        return np.zeros_like(d)
    lo, hi = d[ok].min(), d[ok].max()
    span = hi - lo if hi > lo else 1.0
    return np.where(ok, 1.0 - 0.8 * (d - lo) / span, 0.0)


def normal_preview(normal) -> np.ndarray:
    n = np.asarray(normal, dtype=np.float64)
    return np.where(np.any(n != 0, axis=-1, keepdims=True), 0.5 * (n + 1.0), 0.0)


def write_png(path, image, srgb: bool = True) -> None:
    """Write a [0, 1] float image (h, w) or (h, w, 3); ``srgb`` applies the transfer curve."""
    from PIL import Image

    Image.fromarray(to_uint8(image, srgb)).save(path, format="PNG")


# OBJ and graph JSON


def write_obj(path, mesh: Mesh) -> None:
    with open(path, "w") as fh:
        fh.write(to_obj(mesh))


def write_graph(path, graph: Graph) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_json(graph), fh, indent=1)
        fh.write("\n")


def read_graph(path) -> Graph:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as e:
        raise MalformedFile(f"invalid graph JSON: {e.msg}", e.pos) from None
    except UnicodeDecodeError as e:
        raise MalformedFile("graph JSON is not UTF-8", e.start) from None
    try:
        return graph_from_json(doc)
    except (ValueError, KeyError, TypeError) as e:
        raise MalformedFile(f"invalid graph document: {e}") from None
