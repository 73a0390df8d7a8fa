"""Command-line entry point.

Subcommands mirror the pipeline stages: ``inject`` builds an
adversarial corpus with ground truth, ``scan`` runs one or both
detectors over documents, ``classify`` assigns taxonomy labels to scan
output, ``report`` computes the measurement statistics, and
``validate-math`` runs the numeric self-checks.

Exit codes: 0 on success, 1 when some documents could not be processed
or a check failed (the report still covers the rest), 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from ghostink import __version__
from ghostink.config import RunConfig, load_config
from ghostink.document import load_document
from ghostink.errors import GhostinkError
from ghostink.injector.corpus import CorpusManifest, build_corpus
from ghostink.injector.templates import TEMPLATE_NAMES
from ghostink.metrics import (
    Stratum,
    agreement_matrix,
    bootstrap_precision_interval,
    extrapolate_exposure,
    prevalence_by_period,
    stratified_precision,
    wilson_interval,
)
from ghostink.reports import (
    SCHEMA_METRICS,
    SCHEMA_TAXONOMY,
    make_header,
    read_scan_report,
    write_jsonl,
    write_scan_report,
    write_timings,
)
from ghostink.stage1 import run_stage1
from ghostink.taxonomy import (
    RemoteTaxonomist,
    classify_payload,
    label_distribution,
)
from ghostink.vda import RemoteVisualAnalyzer, vda_verdict
from ghostink.verifier import (
    DetectionVerdict,
    ExcerptVerdict,
    HeuristicVerifier,
    RemoteVerifier,
    classify_document,
)

LABEL_UNVERIFIED = -1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghostink",
        description="Detect and measure hidden prompt injections in PDF resumes.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    inject = sub.add_parser("inject", help="generate an adversarial corpus")
    inject.add_argument("--out", required=True, help="output directory")
    inject.add_argument("--clean", type=int, default=10)
    inject.add_argument("--per-cell", type=int, default=1)
    inject.add_argument("--artifacts", type=int, default=0)
    inject.add_argument("--seed", type=int, default=0)
    inject.add_argument(
        "--templates", default=",".join(TEMPLATE_NAMES),
        help="comma-separated template names",
    )

    scan = sub.add_parser("scan", help="run detectors over documents")
    scan.add_argument(
        "--in", dest="inputs", required=True, nargs="+",
        help="PDF files or directories",
    )
    scan.add_argument("--out", required=True, help="scan report path (.jsonl)")
    scan.add_argument(
        "--detector", choices=("hcd", "vda", "both"), default="hcd"
    )
    scan.add_argument(
        "--verifier", choices=("heuristic", "remote"), default="heuristic"
    )
    scan.add_argument(
        "--vda-backend", choices=("oracle", "remote"), default="oracle"
    )
    scan.add_argument(
        "--stage1-only", action="store_true",
        help="skip semantic verification; report candidates only",
    )
    scan.add_argument("--config", help="JSON run configuration")
    scan.add_argument(
        "--timings", help="timings sidecar path (default: <out>.timings.jsonl)"
    )

    classify = sub.add_parser(
        "classify", help="assign taxonomy labels to scan output"
    )
    classify.add_argument("--scan", required=True, help="scan report to label")
    classify.add_argument("--out", required=True, help="taxonomy report path")
    classify.add_argument(
        "--backend", choices=("rules", "remote"), default="rules"
    )
    classify.add_argument("--config", help="JSON run configuration")

    report = sub.add_parser("report", help="compute measurement statistics")
    report.add_argument(
        "--scan", action="append", default=[],
        help="scan report; pass twice for cross-detector agreement",
    )
    report.add_argument("--manifest", help="corpus manifest for ground truth")
    report.add_argument("--strata", help="JSON audit strata file")
    report.add_argument("--volumes", help="JSON period-to-volume map")
    report.add_argument(
        "--granularity", choices=("month", "half"), default="month"
    )
    report.add_argument("--seed", type=int, default=0)
    report.add_argument("--out", required=True, help="metrics report path")

    sub.add_parser("validate-math", help="run numeric self-checks")
    return parser


def _cmd_inject(args) -> int:
    templates = tuple(t.strip() for t in args.templates.split(",") if t.strip())
    manifest = build_corpus(
        args.out,
        clean=args.clean,
        per_cell=args.per_cell,
        artifacts=args.artifacts,
        seed=args.seed,
        template_names=templates,
    )
    counts = {kind: len(manifest.by_kind(kind)) for kind in
              ("clean", "injected", "artifact")}
    print(
        f"wrote {len(manifest.entries)} documents "
        f"({counts['clean']} clean, {counts['injected']} injected, "
        f"{counts['artifact']} artifact) under {args.out}"
    )
    return 0


def _collect_pdfs(inputs: list[str]) -> list[Path]:
    paths: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(p.rglob("*.pdf")))
        else:
            paths.append(p)
    seen = set()
    unique = []
    for p in paths:
        if p not in seen:
            seen.add(p)
            unique.append(p)
    return unique


def _stage1_only_verdict(document_id: str, stage1) -> DetectionVerdict:
    excerpts = [
        ExcerptVerdict(
            excerpt_id=x.excerpt_id,
            document_id=x.document_id,
            page_index=x.page_index,
            bbox=x.bbox,
            element_ids=x.element_ids,
            text=x.text,
            flags=x.flags,
            label=LABEL_UNVERIFIED,
            rationale="stage 1 candidate; not semantically verified",
            backend="none",
        )
        for x in stage1.excerpts
    ]
    return DetectionVerdict(
        document_id=document_id,
        detector="stage1",
        malicious=False,
        excerpts=excerpts,
    )


def _cmd_scan(args) -> int:
    config = load_config(args.config) if args.config else RunConfig()
    paths = _collect_pdfs(args.inputs)
    if not paths:
        print("no PDF documents found", file=sys.stderr)
        return 2

    if args.verifier == "remote":
        verifier = RemoteVerifier(config.backend)
    else:
        verifier = HeuristicVerifier()
    analyzer = (
        RemoteVisualAnalyzer(config.backend)
        if args.vda_backend == "remote" else None
    )

    verdicts: list[DetectionVerdict] = []
    timings: list[tuple[str, str, float]] = []
    unprocessed: list[dict] = []

    for path in paths:
        document_id = path.stem
        try:
            doc = load_document(path, document_id=document_id)
            if args.stage1_only:
                start = time.perf_counter()
                stage1 = run_stage1(doc, config.thresholds, config.dpi)
                verdicts.append(_stage1_only_verdict(document_id, stage1))
                timings.append(
                    (document_id, "stage1", time.perf_counter() - start)
                )
                continue
            if args.detector in ("hcd", "both"):
                start = time.perf_counter()
                stage1 = run_stage1(doc, config.thresholds, config.dpi)
                judged = [verifier.verify(x) for x in stage1.excerpts]
                verdict = classify_document(document_id, judged, detector="hcd")
                verdict.wall_time_s = time.perf_counter() - start
                verdicts.append(verdict)
                timings.append((document_id, "hcd", verdict.wall_time_s))
            if args.detector in ("vda", "both"):
                start = time.perf_counter()
                verdict = vda_verdict(doc, config.vda, verifier, analyzer)
                verdict.wall_time_s = time.perf_counter() - start
                verdicts.append(verdict)
                timings.append((document_id, "vda", verdict.wall_time_s))
        except GhostinkError as exc:
            unprocessed.append({
                "document_id": document_id,
                "path": str(path),
                "reason": f"{type(exc).__name__}: {exc}",
            })

    meta = {
        "tool_version": __version__,
        "detector": "stage1" if args.stage1_only else args.detector,
        "verifier": args.verifier,
        "vda_backend": args.vda_backend,
        "config_digest": config.digest(),
        "documents": len(paths),
    }
    write_scan_report(args.out, verdicts, meta=meta, unprocessed=unprocessed)
    timings_path = args.timings or f"{args.out}.timings.jsonl"
    write_timings(timings_path, timings)

    flagged = sum(1 for v in verdicts if v.malicious)
    candidates = sum(1 for v in verdicts if v.excerpts)
    print(
        f"scanned {len(paths) - len(unprocessed)}/{len(paths)} documents: "
        f"{flagged} malicious, {candidates} with candidate excerpts"
    )
    if unprocessed:
        print("unprocessed documents:", file=sys.stderr)
        for item in unprocessed:
            print(f"  {item['document_id']}: {item['reason']}", file=sys.stderr)
        return 1
    return 0


def _cmd_classify(args) -> int:
    config = load_config(args.config) if args.config else RunConfig()
    _, documents, _ = read_scan_report(args.scan)
    taxonomist = (
        RemoteTaxonomist(config.backend) if args.backend == "remote" else None
    )

    records = []
    labels = []
    skipped = 0
    failures = 0
    for document in documents:
        malicious_texts = [
            x["text"] for x in document.get("excerpts", ())
            if x.get("label") == 1
        ]
        if not malicious_texts:
            skipped += 1
            continue
        text = " ".join(malicious_texts)
        try:
            if taxonomist is not None:
                label = taxonomist.classify(text)
            else:
                label = classify_payload(text)
        except GhostinkError as exc:
            failures += 1
            records.append({
                "record": "document",
                "document_id": document["document_id"],
                "detector": document.get("detector"),
                "error": f"{type(exc).__name__}: {exc}",
            })
            continue
        labels.append(label)
        records.append({
            "record": "document",
            "document_id": document["document_id"],
            "detector": document.get("detector"),
            "top_level": label.top_level,
            "subtype": label.subtype,
        })

    header = make_header(
        SCHEMA_TAXONOMY, backend=args.backend, scan=str(args.scan)
    )
    summary = {
        "record": "summary",
        "labeled": len(labels),
        "skipped_benign": skipped,
        "failures": failures,
        "distribution": label_distribution(labels) if labels else {},
    }
    write_jsonl(args.out, [header] + records + [summary])
    print(
        f"labeled {len(labels)} documents "
        f"({skipped} benign skipped, {failures} failures)"
    )
    return 1 if failures else 0


def _scan_verdict_map(path: str) -> tuple[str, dict[str, bool]]:
    """Detector name and per-document malicious verdicts of one report."""
    header, documents, _ = read_scan_report(path)
    verdicts: dict[str, bool] = {}
    detectors = set()
    for document in documents:
        detectors.add(document["detector"])
        verdicts[document["document_id"]] = bool(document["malicious"])
    name = header.get("detector") or "+".join(sorted(detectors)) or "scan"
    return name, verdicts


def _split_both_report(path: str) -> list[tuple[str, dict[str, bool]]]:
    """A detector=both report splits into one verdict map per detector."""
    _, documents, _ = read_scan_report(path)
    by_detector: dict[str, dict[str, bool]] = {}
    for document in documents:
        by_detector.setdefault(document["detector"], {})[
            document["document_id"]
        ] = bool(document["malicious"])
    return sorted(by_detector.items())


def _cmd_report(args) -> int:
    records = [make_header(SCHEMA_METRICS, seed=args.seed)]
    exit_code = 0

    maps: list[tuple[str, dict[str, bool]]] = []
    for scan_path in args.scan:
        maps.extend(_split_both_report(scan_path))

    if len(maps) >= 2:
        (name_a, map_a), (name_b, map_b) = maps[0], maps[1]
        only_a = sorted(set(map_a) - set(map_b))
        only_b = sorted(set(map_b) - set(map_a))
        if only_a or only_b:
            print(
                "document sets differ between scans; cannot pair verdicts",
                file=sys.stderr,
            )
            for document_id in only_a:
                print(f"  only in {name_a}: {document_id}", file=sys.stderr)
            for document_id in only_b:
                print(f"  only in {name_b}: {document_id}", file=sys.stderr)
            return 1
        pairs = [(map_a[k], map_b[k]) for k in sorted(map_a)]
        matrix = agreement_matrix(pairs, first=name_a, second=name_b)
        records.append({"record": "agreement", **matrix.to_dict()})

    manifest = CorpusManifest.load(args.manifest) if args.manifest else None

    if manifest is not None and maps:
        for name, verdict_map in maps:
            per_technique: dict[str, list[bool]] = {}
            false_positives = []
            for entry in manifest.entries:
                verdict = verdict_map.get(entry.document_id)
                if verdict is None:
                    continue
                if entry.kind == "injected":
                    per_technique.setdefault(entry.technique, []).append(verdict)
                elif verdict:
                    false_positives.append(entry.document_id)
            if not per_technique and not false_positives:
                continue
            recall = {
                technique: {
                    "detected": sum(hits),
                    "total": len(hits),
                    "recall": sum(hits) / len(hits),
                }
                for technique, hits in sorted(per_technique.items())
            }
            records.append({
                "record": "ground_truth",
                "detector": name,
                "recall_by_technique": recall,
                "false_positive_ids": sorted(false_positives),
            })

    if args.strata:
        raw = json.loads(Path(args.strata).read_text(encoding="utf-8"))
        strata = [
            Stratum(
                name=s["name"],
                population=s["population"],
                sampled=s["sampled"],
                true_positives=s["true_positives"],
            )
            for s in raw
        ]
        point = stratified_precision(strata)
        ci_low, ci_high = bootstrap_precision_interval(strata, seed=args.seed)
        per_stratum_wilson = {
            s.name: wilson_interval(s.true_positives, s.sampled)
            for s in strata if s.sampled > 0
        }
        records.append({
            "record": "stratified_precision",
            **point.to_dict(),
            "bootstrap_ci": [ci_low, ci_high],
            "stratum_wilson": {
                name: list(interval)
                for name, interval in sorted(per_stratum_wilson.items())
            },
        })

    if manifest is not None and maps:
        name, verdict_map = maps[0]
        observations = [
            (entry.period, verdict_map[entry.document_id])
            for entry in manifest.entries
            if entry.document_id in verdict_map
        ]
        if observations:
            points = prevalence_by_period(observations, args.granularity)
            records.append({
                "record": "prevalence",
                "detector": name,
                "granularity": args.granularity,
                "periods": {
                    key: point.to_dict() for key, point in points.items()
                },
            })
            if args.volumes:
                volumes = json.loads(
                    Path(args.volumes).read_text(encoding="utf-8")
                )
                rates = {key: point.rate for key, point in points.items()}
                expected = extrapolate_exposure(rates, volumes)
                records.append({
                    "record": "extrapolation",
                    "detector": name,
                    "expected_documents": expected,
                })

    if len(records) == 1:
        print("no inputs produced any metrics", file=sys.stderr)
        return 2
    write_jsonl(args.out, records)
    print(f"wrote {len(records) - 1} metric block(s) to {args.out}")
    return exit_code


def _cmd_validate_math() -> int:
    from ghostink.selfcheck import run_selfchecks

    failures = 0
    for result in run_selfchecks():
        status = "PASS" if result.passed else "FAIL"
        if not result.passed:
            failures += 1
        print(f"{status} {result.name}: {result.detail}")
    print(f"{'all checks passed' if not failures else f'{failures} check(s) failed'}")
    return 1 if failures else 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "inject":
            return _cmd_inject(args)
        if args.command == "scan":
            return _cmd_scan(args)
        if args.command == "classify":
            return _cmd_classify(args)
        if args.command == "report":
            return _cmd_report(args)
        if args.command == "validate-math":
            return _cmd_validate_math()
    except GhostinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
