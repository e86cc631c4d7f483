"""Flat binary checkpoint container.

Layout: an 8-byte magic/version header, a u64 manifest length, a UTF-8 text
manifest (one ``name\\tshape\\toffset\\tcount`` line per array, offsets in
elements into the data block), then the concatenated little-endian float64
payload.  Arrays are stored sorted by name so files are byte-deterministic.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"FLAMECK1"


def save_arrays(path, arrays: dict[str, np.ndarray]):
    items = []
    offset = 0
    for name in sorted(arrays):
        if "\t" in name or "\n" in name:
            raise ValueError(f"invalid array name {name!r}")
        arr = np.asarray(arrays[name], dtype="<f8")
        shape = ",".join(str(n) for n in arr.shape)
        items.append((name, shape, offset, np.ascontiguousarray(arr)))
        offset += arr.size
    manifest = "".join(f"{name}\t{shape}\t{off}\t{arr.size}\n"
                       for name, shape, off, arr in items).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(manifest)))
        fh.write(manifest)
        for _, _, _, arr in items:
            fh.write(arr.tobytes())


def load_arrays(path) -> dict[str, np.ndarray]:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise ValueError(f"not a checkpoint file (magic {magic!r})")
        (mlen,) = struct.unpack("<Q", fh.read(8))
        manifest = fh.read(mlen).decode("utf-8")
        data = np.frombuffer(fh.read(), dtype="<f8")
    out = {}
    for line in manifest.splitlines():
        name, shape, off, count = line.split("\t")
        off, count = int(off), int(count)
        dims = tuple(int(n) for n in shape.split(",") if n)
        out[name] = data[off:off + count].reshape(dims).astype(np.float64)
    return out


def pack_uint64(vec: np.ndarray) -> np.ndarray:
    """Reinterpret u64 words (e.g. RNG state) as f64 bit patterns for storage."""
    return np.asarray(vec, dtype=np.uint64).view(np.float64)


def unpack_uint64(vec: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(vec, dtype=np.float64).view(np.uint64)
