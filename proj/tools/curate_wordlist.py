#!/usr/bin/env python3
"""Curate the bundled word list from a SCOWL-derived source list.

Keeps lowercase ASCII words of length 3..10, then thins the sorted list to a
target size by even striding so the file stays small but alphabetically
diverse. Words passed via --require are always kept (the twenty-questions
lexicon nouns must appear in the bundled list).

Usage:
  curate_wordlist.py SOURCE OUT --target 9000 --require nouns.txt
"""

import argparse
import re
import sys

WORD_RE = re.compile(r"^[a-z]{3,10}$")


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("source")
    ap.add_argument("out")
    ap.add_argument("--target", type=int, default=9000)
    ap.add_argument("--require", default=None)
    args = ap.parse_args()

    with open(args.source) as f:
        words = sorted({w.strip() for w in f if WORD_RE.match(w.strip())})
    if not words:
        print("no usable words in source", file=sys.stderr)
        return 1

    required = set()
    if args.require:
        with open(args.require) as f:
            required = {w.strip() for w in f if w.strip() and not w.startswith("#")}
        missing = required - set(words)
        if missing:
            print(f"note: {len(missing)} required words absent from source, "
                  f"adding verbatim: {sorted(missing)[:10]}...", file=sys.stderr)

    stride = max(1, len(words) // args.target)
    kept = set(words[::stride]) | (required & set(words)) | required

    five = sum(1 for w in kept if len(w) == 5)
    if five < 400:
        # word-guess generation needs at least 400 distinct 5-letter words
        extra = [w for w in words if len(w) == 5 and w not in kept]
        kept |= set(extra[:: max(1, len(extra) // (400 - five + 50))])

    out = sorted(kept)
    with open(args.out, "w") as f:
        f.write("\n".join(out) + "\n")
    print(f"wrote {len(out)} words ({sum(1 for w in out if len(w) == 5)} five-letter)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
