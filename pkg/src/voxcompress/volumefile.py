"""Binary volume container: magic "F32V", 4-byte little-endian header length,
UTF-8 JSON header, then the raw float32 little-endian payload laid out
voxel-major (all samples of voxel 0, then voxel 1, ...)."""

from __future__ import annotations

import base64
import json
import struct

import numpy as np

from .errors import VolumeFormatError
from .lattice import GridShape, ImageStack, Mask

MAGIC = b"F32V"
FORMAT_VERSION = 1


def _mask_header(mask: Mask) -> dict:
    if mask.inside.all():
        return {"kind": "full"}
    packed = np.packbits(mask.inside.ravel())
    return {"kind": "packed_bits",
            "data": base64.b64encode(packed.tobytes()).decode("ascii")}


def _mask_from_header(shape: GridShape, entry: dict) -> Mask:
    kind = entry.get("kind")
    if kind == "full":
        return Mask.full(shape)
    if kind == "packed_bits":
        packed = np.frombuffer(base64.b64decode(entry["data"]), dtype=np.uint8)
        bits = np.unpackbits(packed)[: shape.n_cells].astype(bool)
        return Mask(shape, bits.reshape(shape.dims))
    raise VolumeFormatError(f"unknown mask encoding {kind!r}")


def write_volume(path, stack: ImageStack) -> None:
    header = {
        "version": FORMAT_VERSION,
        "shape": list(stack.mask.shape.dims),
        "n": stack.n_samples,
        "endianness": "little",
        "mask": _mask_header(stack.mask),
    }
    header_bytes = json.dumps(header).encode("utf-8")
    payload = np.ascontiguousarray(stack.data, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header_bytes)))
        fh.write(header_bytes)
        fh.write(payload)


def read_volume(path) -> ImageStack:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise VolumeFormatError(f"bad magic {magic!r}")
        (header_len,) = struct.unpack("<I", fh.read(4))
        try:
            header = json.loads(fh.read(header_len).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise VolumeFormatError(f"unreadable header: {exc}") from exc
        if header.get("version") != FORMAT_VERSION:
            raise VolumeFormatError(f"unsupported version {header.get('version')}")
        if header.get("endianness") != "little":
            raise VolumeFormatError("payload must be little-endian")
        shape = GridShape(tuple(header["shape"]))
        mask = _mask_from_header(shape, header.get("mask", {}))
        n = int(header["n"])
        payload = fh.read()
    expected = mask.n_voxels * n * 4
    if len(payload) != expected:
        raise VolumeFormatError(
            f"payload is {len(payload)} bytes, expected {expected} "
            f"({mask.n_voxels} voxels x {n} samples x 4)"
        )
    data = np.frombuffer(payload, dtype="<f4").reshape(mask.n_voxels, n)
    return ImageStack(mask, data.astype(np.float64))
