"""Bit-exact file formats: MMTL tensors, PPM/PGM rasters, weight files.

MMTL is a minimal little-endian tensor container:

    magic "MMTL" | version byte (1) | dtype byte (1 = float32) |
    ndim byte | ndim x uint32 dims (LE) | row-major float32 payload

Writers always produce canonical bytes, so write -> read -> write is
byte-identical, which the deterministic CLI outputs rely on.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .posenet import LAYER_SPECS, PoseNetWeights

MMTL_MAGIC = b"MMTL"
MMTL_VERSION = 1
MMTL_DTYPE_F32 = 1


class FormatError(ValueError):
    pass


def mmtl_encode(arr: np.ndarray) -> bytes:
    a = np.ascontiguousarray(arr, dtype="<f4")
    if a.ndim < 1 or a.ndim > 255:
        raise FormatError(f"unsupported ndim {a.ndim}")
    if any(d < 1 or d > 0xFFFFFFFF for d in a.shape):
        raise FormatError(f"dims out of range: {a.shape}")
    header = MMTL_MAGIC + bytes([MMTL_VERSION, MMTL_DTYPE_F32, a.ndim])
    header += struct.pack(f"<{a.ndim}I", *a.shape)
    return header + a.tobytes()


def mmtl_decode_at(data: bytes, offset: int = 0) -> tuple[np.ndarray, int]:
    """Decode one tensor starting at offset; returns (array, next offset)."""
    if data[offset:offset + 4] != MMTL_MAGIC:
        raise FormatError("bad magic, not an MMTL tensor")
    if len(data) < offset + 7:
        raise FormatError("truncated MMTL header")
    version, dtype, ndim = data[offset + 4:offset + 7]
    if version != MMTL_VERSION:
        raise FormatError(f"unsupported MMTL version {version}")
    if dtype != MMTL_DTYPE_F32:
        raise FormatError(f"unsupported MMTL dtype code {dtype}")
    if ndim < 1:
        raise FormatError("MMTL ndim must be >= 1")
    dims_end = offset + 7 + 4 * ndim
    if len(data) < dims_end:
        raise FormatError("truncated MMTL dims")
    dims = struct.unpack(f"<{ndim}I", data[offset + 7:dims_end])
    if any(d < 1 for d in dims):
        raise FormatError(f"MMTL dims must be >= 1, got {dims}")
    count = int(np.prod(dims, dtype=np.int64))
    end = dims_end + 4 * count
    if len(data) < end:
        raise FormatError(f"MMTL payload truncated: need {4 * count} bytes")
    arr = np.frombuffer(data[dims_end:end], dtype="<f4").reshape(dims)
    return arr.copy(), end


def mmtl_decode(data: bytes) -> np.ndarray:
    arr, end = mmtl_decode_at(data, 0)
    if end != len(data):
        raise FormatError(f"{len(data) - end} trailing bytes after MMTL payload")
    return arr


def write_mmtl(path: str | Path, arr: np.ndarray) -> None:
    Path(path).write_bytes(mmtl_encode(arr))


def read_mmtl(path: str | Path) -> np.ndarray:
    return mmtl_decode(Path(path).read_bytes())


def image_to_u8(img: np.ndarray) -> np.ndarray:
    """Quantize float values in [0, 1] to bytes via round(255 * v)."""
    return np.clip(np.rint(np.asarray(img) * 255.0), 0, 255).astype(np.uint8)


def ppm_encode(rgb_u8: np.ndarray) -> bytes:
    a = np.asarray(rgb_u8)
    if a.ndim != 3 or a.shape[2] != 3 or a.dtype != np.uint8:
        raise FormatError(f"PPM wants uint8 (H, W, 3), got {a.dtype} {a.shape}")
    h, w = a.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + a.tobytes()


def pgm_encode(gray_u8: np.ndarray) -> bytes:
    a = np.asarray(gray_u8)
    if a.ndim != 2 or a.dtype != np.uint8:
        raise FormatError(f"PGM wants uint8 (H, W), got {a.dtype} {a.shape}")
    h, w = a.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + a.tobytes()


def _parse_pnm(data: bytes, magic: bytes, channels: int) -> np.ndarray:
    if data[:2] != magic:
        raise FormatError(f"expected {magic.decode()} file")
    fields: list[int] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        try:
            fields.append(int(data[start:pos]))
        except ValueError as exc:
            raise FormatError("malformed raster header") from exc
    pos += 1  # single whitespace byte after maxval
    w, h, maxval = fields
    if maxval != 255:
        raise FormatError(f"only maxval 255 supported, got {maxval}")
    need = w * h * channels
    if len(data) - pos < need:
        raise FormatError("raster payload truncated")
    arr = np.frombuffer(data[pos:pos + need], dtype=np.uint8)
    shape = (h, w, channels) if channels > 1 else (h, w)
    return arr.reshape(shape).copy()


def ppm_decode(data: bytes) -> np.ndarray:
    return _parse_pnm(data, b"P6", 3)


def pgm_decode(data: bytes) -> np.ndarray:
    return _parse_pnm(data, b"P5", 1)


def write_ppm(path: str | Path, rgb_u8: np.ndarray) -> None:
    Path(path).write_bytes(ppm_encode(rgb_u8))


def read_ppm(path: str | Path) -> np.ndarray:
    return ppm_decode(Path(path).read_bytes())


def write_pgm(path: str | Path, gray_u8: np.ndarray) -> None:
    Path(path).write_bytes(pgm_encode(gray_u8))


def read_pgm(path: str | Path) -> np.ndarray:
    return pgm_decode(Path(path).read_bytes())


def weight_map_preview(weights: np.ndarray) -> np.ndarray:
    """Visualize a loss weight map: 255 where amplified, 25 elsewhere."""
    w = np.asarray(weights)
    return np.where(w > 1.0, 255, 25).astype(np.uint8)


def posenet_weights_bytes(weights: PoseNetWeights) -> bytes:
    """One JSON manifest line, then kernel/bias MMTL blobs in layer order."""
    manifest = {
        "format": "posenet-weights",
        "layers": [
            {"name": name, "kernel": list(kern.shape), "bias": list(bias.shape)}
            for (name, *_), kern, bias in zip(LAYER_SPECS, weights.kernels,
                                              weights.biases)
        ],
    }
    blob = json.dumps(manifest, separators=(",", ":"), sort_keys=True).encode() + b"\n"
    for kern, bias in zip(weights.kernels, weights.biases):
        blob += mmtl_encode(kern) + mmtl_encode(bias)
    return blob


def posenet_weights_from_bytes(data: bytes) -> PoseNetWeights:
    nl = data.find(b"\n")
    if nl < 0:
        raise FormatError("missing manifest line")
    try:
        manifest = json.loads(data[:nl])
    except json.JSONDecodeError as exc:
        raise FormatError("malformed manifest") from exc
    layers = manifest.get("layers")
    if not isinstance(layers, list) or len(layers) != len(LAYER_SPECS):
        raise FormatError(f"manifest must list {len(LAYER_SPECS)} layers")
    kernels = []
    biases = []
    offset = nl + 1
    for entry, (name, cin, cout, k, _s, _p) in zip(layers, LAYER_SPECS):
        if entry.get("name") != name:
            raise FormatError(f"layer name {entry.get('name')!r} != {name!r}")
        kern, offset = mmtl_decode_at(data, offset)
        bias, offset = mmtl_decode_at(data, offset)
        if list(kern.shape) != entry["kernel"] or list(bias.shape) != entry["bias"]:
            raise FormatError(f"{name}: tensor shapes disagree with manifest")
        kernels.append(kern.astype(np.float64))
        biases.append(bias.astype(np.float64))
    if offset != len(data):
        raise FormatError("trailing bytes after weight tensors")
    return PoseNetWeights(tuple(kernels), tuple(biases))


def save_posenet_weights(path: str | Path, weights: PoseNetWeights) -> None:
    Path(path).write_bytes(posenet_weights_bytes(weights))


def load_posenet_weights(path: str | Path) -> PoseNetWeights:
    return posenet_weights_from_bytes(Path(path).read_bytes())
