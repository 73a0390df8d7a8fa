"""Build the seed-pinned evaluation corpus used by the acceptance suite.

600 documents by default: 360 injected (4 techniques x 9 payload cells
x 10), 200 clean templates, and 40 benign artifacts whose furniture
text is hidden with the same techniques. The manifest written next to
the documents is the ground truth for recall and false-positive
measurement.
"""

import argparse

from ghostink.injector.corpus import build_corpus


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="corpus", help="output directory")
    parser.add_argument("--clean", type=int, default=200)
    parser.add_argument("--per-cell", type=int, default=10)
    parser.add_argument("--artifacts", type=int, default=40)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    manifest = build_corpus(
        args.out,
        clean=args.clean,
        per_cell=args.per_cell,
        artifacts=args.artifacts,
        seed=args.seed,
    )
    counts = {
        kind: len(manifest.by_kind(kind))
        for kind in ("clean", "injected", "artifact")
    }
    print(
        f"{len(manifest.entries)} documents under {args.out} "
        f"(clean={counts['clean']} injected={counts['injected']} "
        f"artifact={counts['artifact']}, seed={args.seed})"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
