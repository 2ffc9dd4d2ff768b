#!/usr/bin/env python3
"""Reference implementation of the embedding hash spec, used to freeze the
near-duplicate golden list. Deliberately imports nothing from the package:
this script IS the independent oracle for the published hash definition
(FNV-1a 64 over each trigram's code points as 4 little-endian bytes each,
bucketed mod D, L2-normalized counts over STX/ETX-padded lowercase text).

Run from the repo root:  python tools/gen_near_duplicate_golden.py
"""

import json
import math
from pathlib import Path

DIM = 512
OUT = Path(__file__).resolve().parent.parent / "src" / "twolane" / "data" / "near_duplicate_pairs.jsonl"

BASES = [
    "pick up the red cube",
    "pick the blue cube and place it in the left box",
    "put the toy into the box",
    "rotate the bowl by 30 degrees clockwise",
    "put the red toy into the green bowl",
    "solve the equation on the table",
    "fix the word to spell ICRA",
    "sort the cubes by color into the matching zones",
    "I'm allergic to spicy food",
    "stack in order from bottom to top: the red cube, the green cube",
]

# One stop-word inserted at five different positions per base sentence.
STOPWORDS = ["just", "now", "simply", "the", "really"]


def fnv1a64_codepoints(cps):
    h = 0xCBF29CE484222325
    for cp in cps:
        for k in range(4):
            h ^= (cp >> (8 * k)) & 0xFF
            h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def embed(text, dim=DIM):
    folded = text.lower().strip()
    padded = [0x02] + [ord(c) for c in folded] + [0x03]
    counts = [0.0] * dim
    for i in range(len(padded) - 2):
        counts[fnv1a64_codepoints(padded[i : i + 3]) % dim] += 1.0
    norm = math.sqrt(sum(c * c for c in counts))
    return [c / norm for c in counts]


def cosine(a, b):
    return sum(x * y for x, y in zip(a, b))


def main():
    pairs = []
    for base in BASES:
        words = base.split(" ")
        for j, stop in enumerate(STOPWORDS):
            pos = 1 + (j * max(1, (len(words) - 1)) // len(STOPWORDS))
            variant = " ".join(words[:pos] + [stop] + words[pos:])
            pairs.append((base, variant))
    assert len(pairs) == 50
    with open(OUT, "w", encoding="utf-8") as fh:
        for base, variant in pairs:
            score = cosine(embed(base), embed(variant))
            fh.write(
                json.dumps(
                    {"base": base, "variant": variant, "cosine": round(score, 12)},
                    sort_keys=True,
                )
                + "\n"
            )
    print(f"wrote {len(pairs)} pairs to {OUT}")


if __name__ == "__main__":
    main()
