"""Pure-Python reference implementation of the hashing kernels.

This is the fallback selected when the compiled extension is unavailable.
Both implementations must agree bit-for-bit: the embedding contract is
"deterministic across runs and machines", so the hash is pinned here.

Hash spec (stable, versioned with the caption grammar):
  FNV-1a 64-bit over the trigram's three code points, each serialized as
  4 little-endian bytes.  Bucket index = hash mod dim.
"""

import numpy as np

BACKEND = "pure"

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

# Boundary markers padded onto the text before trigram extraction (STX/ETX).
PAD_START = "\x02"
PAD_END = "\x03"


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash of a byte string."""
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & _MASK64
    return h


def _trigram_hash(a: int, b: int, c: int) -> int:
    h = FNV_OFFSET
    for cp in (a, b, c):
        for byte in cp.to_bytes(4, "little"):
            h ^= byte
            h = (h * FNV_PRIME) & _MASK64
    return h


def trigram_counts(text: str, dim: int) -> np.ndarray:
    """Bucketed character-trigram counts of `text` (already case-folded).

    Pads with one boundary marker on each side, so a string of n >= 1
    characters yields exactly n trigrams.
    """
    padded = PAD_START + text + PAD_END
    counts = np.zeros(dim, dtype=np.float64)
    cps = [ord(ch) for ch in padded]
    for i in range(len(cps) - 2):
        h = _trigram_hash(cps[i], cps[i + 1], cps[i + 2])
        counts[h % dim] += 1.0
    return counts
