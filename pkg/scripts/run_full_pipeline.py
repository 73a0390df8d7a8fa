"""Run the whole measurement pipeline on a synthetic corpus.

inject -> scan (both detectors) -> classify -> report, all through the
command line interface, leaving every artifact under one working
directory:

    corpus/manifest.jsonl   ground truth
    scan_hcd.jsonl          cascade detector verdicts
    scan_vda.jsonl          render-diff detector verdicts
    taxonomy.jsonl          payload labels for flagged documents
    metrics.jsonl           agreement, recall vs ground truth, prevalence
"""

import argparse
from pathlib import Path

from ghostink.cli import main as ghostink


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default="pipeline_run")
    parser.add_argument("--clean", type=int, default=50)
    parser.add_argument("--per-cell", type=int, default=2)
    parser.add_argument("--artifacts", type=int, default=10)
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--strata", help="optional JSON audit strata file")
    parser.add_argument("--volumes", help="optional JSON period volumes file")
    args = parser.parse_args()

    work = Path(args.workdir)
    corpus = work / "corpus"
    steps = [
        ["inject", "--out", str(corpus),
         "--clean", str(args.clean), "--per-cell", str(args.per_cell),
         "--artifacts", str(args.artifacts), "--seed", str(args.seed)],
        ["scan", "--in", str(corpus / "docs"),
         "--out", str(work / "scan_hcd.jsonl"), "--detector", "hcd"],
        ["scan", "--in", str(corpus / "docs"),
         "--out", str(work / "scan_vda.jsonl"), "--detector", "vda"],
        ["classify", "--scan", str(work / "scan_hcd.jsonl"),
         "--out", str(work / "taxonomy.jsonl")],
    ]
    report = [
        "report",
        "--scan", str(work / "scan_hcd.jsonl"),
        "--scan", str(work / "scan_vda.jsonl"),
        "--manifest", str(corpus / "manifest.jsonl"),
        "--seed", str(args.seed),
        "--out", str(work / "metrics.jsonl"),
    ]
    if args.strata:
        report += ["--strata", args.strata]
    if args.volumes:
        report += ["--volumes", args.volumes]
    steps.append(report)

    for step in steps:
        print(f"$ ghostink {' '.join(step)}")
        rc = ghostink(step)
        if rc != 0:
            print(f"step failed with exit code {rc}")
            return rc
    print(f"pipeline complete; artifacts under {work}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
