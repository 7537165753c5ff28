"""Vertex labels as byte tokens, plus the seeded hashes used by the samplers.

Every hash has a scalar form and a numpy form; they agree bit for bit, which
lets the per-edge and chunked update paths of the sketch produce identical state.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
GOLDEN = 0x9E3779B97F4A7C15
HEAD_SALT = 0x68656164  # "head"
TAIL_SALT = 0x7461696C  # "tail"
_INV_2_53 = 1.0 / (1 << 53)


def as_label(x) -> bytes:
    if isinstance(x, bytes):
        tok = x
    elif isinstance(x, (np.bytes_,)):
        tok = bytes(x)
    elif isinstance(x, (int, np.integer)):
        tok = str(int(x)).encode()
    else:
        tok = str(x).encode("utf-8")
    if not tok or b"\x00" in tok:
        raise ValueError(f"invalid vertex label {x!r}")
    return tok


def as_label_array(a) -> np.ndarray:
    """Coerce a 1-d array-like of labels to a numpy bytes array."""
    arr = np.asarray(a)
    if arr.dtype.kind == "S":
        return arr
    if arr.dtype.kind in "iu":
        return arr.astype("S")
    return np.array([as_label(x) for x in arr.tolist()], dtype="S")


def mix64(x: int) -> int:
    """splitmix64 finalizer, a bijection on 64-bit integers."""
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & MASK64
    return x ^ (x >> 31)


def seed_key(seed: int, salt: int) -> int:
    return mix64((int(seed) & MASK64) ^ mix64(salt))


def fnv1a(tok: bytes) -> int:
    h = FNV_OFFSET
    for b in tok:
        h = (h ^ b) * FNV_PRIME & MASK64
    return h


def label_hash(tok: bytes, key: int) -> int:
    return mix64(fnv1a(tok) ^ key)


def unit(x: int) -> float:
    """Map a 64-bit integer to [0, 1) using its top 53 bits."""
    return (x >> 11) * _INV_2_53


def coin(key: int, pos: int) -> float:
    """Uniform draw for endpoint occurrence ``pos`` (counter-based)."""
    return unit(mix64((key + (pos + 1) * GOLDEN) & MASK64))


# numpy counterparts ---------------------------------------------------------

_U = np.uint64


def mix64_np(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    x ^= x >> _U(30)
    x *= _U(0xBF58476D1CE4E5B9)
    x ^= x >> _U(27)
    x *= _U(0x94D049BB133111EB)
    x ^= x >> _U(31)
    return x


def fnv1a_np(labels: np.ndarray) -> np.ndarray:
    labels = np.ascontiguousarray(labels)
    n, width = labels.shape[0], labels.dtype.itemsize
    h = np.full(n, FNV_OFFSET, dtype=np.uint64)
    if n == 0:
        return h
    raw = labels.view(np.uint8).reshape(n, width)
    prime = _U(FNV_PRIME)
    for j in range(width):
        col = raw[:, j]
        live = col != 0
        if not live.any():
            break
        nxt = (h ^ col.astype(np.uint64)) * prime
        h = np.where(live, nxt, h)
    return h


def label_hash_np(labels: np.ndarray, key: int) -> np.ndarray:
    return mix64_np(fnv1a_np(labels) ^ _U(key))


def unit_np(x: np.ndarray) -> np.ndarray:
    return (x >> _U(11)).astype(np.float64) * _INV_2_53


def coin_np(key: int, pos: np.ndarray) -> np.ndarray:
    x = _U(key) + (pos.astype(np.uint64) + _U(1)) * _U(GOLDEN)
    return unit_np(mix64_np(x))
