#!/usr/bin/env python3
"""Regenerate the committed starter bank from the hand-written seeds.

Run from the repo root:  python tools/gen_starter_bank.py
"""

from pathlib import Path

from twolane import bank

OUT = Path(__file__).resolve().parent.parent / "src" / "twolane" / "data" / "starter_bank.jsonl"


def main() -> None:
    built = bank.make_starter_bank()
    bank.save_bank(built, OUT)
    fast = sum(1 for e in built.entries if e.label.value == "FAST")
    print(f"wrote {len(built)} entries ({fast} FAST / {len(built) - fast} SLOW) to {OUT}")


if __name__ == "__main__":
    main()
