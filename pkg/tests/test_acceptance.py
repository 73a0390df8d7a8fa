"""Release acceptance checks.

Each test covers one numbered entry of the release checklist and
prints a single "ACCEPTANCE nn PASS|FAIL" line directly to the
terminal, bypassing capture, so a full run reads as a checklist. The heavy criteria share
one session-scoped pipeline: a 600-document seed-pinned corpus (360
injected, 200 clean, 40 benign artifacts) scanned by both detectors
through the real CLI, then classified. A second identical pipeline
backs the determinism criterion.
"""

import time
from types import SimpleNamespace

import pytest

from ghostink.cli import main as cli_main
from ghostink.injector.corpus import build_corpus
from ghostink.metrics import (
    AgreementMatrix,
    Stratum,
    bootstrap_rate_interval,
    prevalence_by_period,
    stratified_precision,
    weighted_rate,
    wilson_interval,
)
from ghostink.patterns import normalize_text
from ghostink.reports import (
    read_jsonl,
    read_scan_report,
    reports_equal_modulo_header,
)
from ghostink.stage1 import FLAG_LOW_INK, FLAG_OUT_OF_BOUNDS
from ghostink.taxonomy import classify_payload

SEED = 11
N_CLEAN = 200
N_PER_CELL = 10
N_ARTIFACTS = 40
N_INJECTED = 360  # 4 techniques x 9 payload cells x 10


@pytest.fixture
def announce(capsys):
    def _announce(number, passed, detail):
        status = "PASS" if passed else "FAIL"
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:2d} {status} {detail}", flush=True)
        assert passed, f"criterion {number}: {detail}"

    return _announce


def _run_pipeline(base):
    """Corpus build + both detector scans + taxonomy, all through the CLI."""
    started = time.perf_counter()
    manifest = build_corpus(
        base / "corpus",
        clean=N_CLEAN,
        per_cell=N_PER_CELL,
        artifacts=N_ARTIFACTS,
        seed=SEED,
    )
    docs = str(base / "corpus" / "docs")
    hcd_path = base / "hcd.jsonl"
    vda_path = base / "vda.jsonl"
    tax_path = base / "taxonomy.jsonl"
    assert cli_main(
        ["scan", "--in", docs, "--out", str(hcd_path), "--detector", "hcd"]
    ) == 0
    assert cli_main(
        ["scan", "--in", docs, "--out", str(vda_path), "--detector", "vda"]
    ) == 0
    detector_seconds = time.perf_counter() - started
    assert cli_main(
        ["classify", "--scan", str(hcd_path), "--out", str(tax_path)]
    ) == 0

    hcd_docs = {d["document_id"]: d for d in read_scan_report(hcd_path)[1]}
    vda_docs = {d["document_id"]: d for d in read_scan_report(vda_path)[1]}
    return SimpleNamespace(
        base=base,
        manifest=manifest,
        hcd_path=hcd_path,
        vda_path=vda_path,
        tax_path=tax_path,
        hcd=hcd_docs,
        vda=vda_docs,
        detector_seconds=detector_seconds,
    )


@pytest.fixture(scope="session")
def pipeline(tmp_path_factory):
    return _run_pipeline(tmp_path_factory.mktemp("acceptance_a"))


@pytest.fixture(scope="session")
def pipeline_repeat(tmp_path_factory):
    return _run_pipeline(tmp_path_factory.mktemp("acceptance_b"))


def _element_coverage(document_record, element_ids):
    """Covered payload elements and the union of their excerpt flags."""
    covered = set()
    flags = set()
    for excerpt in document_record.get("excerpts", ()):
        hit = set(excerpt["element_ids"]) & set(element_ids)
        if hit:
            covered |= hit
            flags |= set(excerpt["flags"])
    return covered, flags


def test_criterion_01_stratified_precision_reproduction(announce):
    started = time.perf_counter()
    hcd = stratified_precision([
        Stratum("both", 517, 100, 100),
        Stratum("hcd_only", 276, 100, 60),
    ])
    vda = stratified_precision([
        Stratum("both", 517, 100, 100),
        Stratum("vda_only", 85, 85, 41),
    ])
    elapsed = time.perf_counter() - started
    ok = (
        abs(hcd.estimated_true_positives - 682.6) < 0.05
        and abs(hcd.precision * 100 - 86.1) <= 0.05
        and abs(vda.estimated_true_positives - 558.0) < 0.05
        and abs(vda.precision * 100 - 92.7) <= 0.05
        and elapsed < 1.0
    )
    announce(1, ok, (
        f"precision estimator: hcd TP={hcd.estimated_true_positives:.1f} "
        f"p={hcd.precision * 100:.4f}%, vda TP={vda.estimated_true_positives:.1f} "
        f"p={vda.precision * 100:.4f}% in {elapsed:.3f}s"
    ))


def test_criterion_02_agreement_matrix_reproduction(announce):
    started = time.perf_counter()
    matrix = AgreementMatrix(
        both_flagged=517, first_only=276, second_only=85, neither=61151
    )
    elapsed = time.perf_counter() - started
    ok = (
        matrix.total == 62029
        and abs(matrix.neither_fraction * 100 - 98.6) <= 0.05
        and elapsed < 1.0
    )
    announce(2, ok, (
        f"agreement matrix: total={matrix.total} "
        f"both-benign={matrix.neither_fraction * 100:.4f}% in {elapsed:.3f}s"
    ))


def test_criterion_03_prevalence_arithmetic(announce):
    started = time.perf_counter()
    observations = (
        [("2025-H1", True)] * 993 + [("2025-H1", False)] * (83277 - 993)
        + [("2025-H2", True)] * 1037 + [("2025-H2", False)] * (113405 - 1037)
    )
    points = prevalence_by_period(observations, granularity="half")
    elapsed = time.perf_counter() - started
    first = points["2025-H1"].rate * 100
    second = points["2025-H2"].rate * 100
    pooled = points["all"].rate * 100
    ok = (
        abs(first - 1.19) <= 0.005
        and abs(second - 0.91) <= 0.005
        and abs(pooled - 1.03) <= 0.01
        and points["all"].total == 196682
        and elapsed < 1.0
    )
    announce(3, ok, (
        f"prevalence: H1={first:.4f}% H2={second:.4f}% "
        f"pooled={pooled:.4f}% in {elapsed:.3f}s"
    ))


def test_criterion_04_wilson_oracle(announce):
    oracle = {
        (0, 10): (2.7755575615628914e-17, 0.27753279986288915),
        (50, 100): (0.4038315303659957, 0.5961684696340044),
        (5, 500): (0.004278753896590498, 0.023193099755730702),
        (993, 83277): (0.011209034549936756, 0.012684113309341265),
    }
    worst = max(
        abs(got - want)
        for (k, n), expected in oracle.items()
        for got, want in zip(wilson_interval(k, n), expected)
    )
    announce(4, worst <= 1e-9, (
        f"wilson intervals match pre-build closed-form oracle, "
        f"max deviation {worst:.2e}"
    ))


def test_criterion_05_synthetic_corpus_recall(announce, pipeline):
    injected = pipeline.manifest.by_kind("injected")
    assert len(injected) == N_INJECTED

    covered = {t: [0, 0] for t in
               ("ColorBased", "SizeBased", "PositionBased", "LayerBased")}
    strict_ok = True
    vda_hidden_ok = 0
    for entry in injected:
        record = pipeline.hcd[entry.document_id]
        hit, flags = _element_coverage(record, entry.element_ids)
        covered[entry.technique][0] += len(hit)
        covered[entry.technique][1] += len(entry.element_ids)
        if entry.technique == "PositionBased":
            strict_ok &= (
                len(hit) == len(entry.element_ids)
                and FLAG_OUT_OF_BOUNDS in flags
            )
        if entry.technique == "LayerBased":
            strict_ok &= (
                len(hit) == len(entry.element_ids) and FLAG_LOW_INK in flags
            )
        vda_hit, _ = _element_coverage(
            pipeline.vda[entry.document_id], entry.element_ids
        )
        vda_hidden_ok += vda_hit == set(entry.element_ids)

    rates = {t: hits / total for t, (hits, total) in covered.items()}
    clean_visible = sum(
        not pipeline.vda[e.document_id]["excerpts"]
        for e in pipeline.manifest.by_kind("clean")
    )
    ok = (
        rates["ColorBased"] >= 0.99
        and rates["SizeBased"] >= 0.99
        and strict_ok
        and rates["PositionBased"] == 1.0
        and rates["LayerBased"] == 1.0
        and vda_hidden_ok == N_INJECTED
        and clean_visible == N_CLEAN
        and pipeline.detector_seconds < 900.0
    )
    announce(5, ok, (
        f"recall: color={rates['ColorBased']:.4f} size={rates['SizeBased']:.4f} "
        f"position={rates['PositionBased']:.4f} layer={rates['LayerBased']:.4f}, "
        f"vda hidden-invisible {vda_hidden_ok}/{N_INJECTED}, "
        f"clean-visible {clean_visible}/{N_CLEAN}, "
        f"detectors took {pipeline.detector_seconds:.1f}s"
    ))


def test_criterion_06_localization_round_trip(announce, pipeline):
    exact = 0
    for entry in pipeline.manifest.by_kind("injected"):
        want = normalize_text(entry.payload_text)
        record = pipeline.hcd[entry.document_id]
        if any(normalize_text(x["text"]) == want
               for x in record.get("excerpts", ())):
            exact += 1
    fraction = exact / N_INJECTED
    announce(6, fraction >= 0.99, (
        f"localization: {exact}/{N_INJECTED} payloads recovered verbatim "
        f"({fraction * 100:.1f}%)"
    ))


def test_criterion_07_false_positive_behavior(announce, pipeline):
    clean_malicious = sum(
        pipeline.hcd[e.document_id]["malicious"]
        for e in pipeline.manifest.by_kind("clean")
    )
    artifacts = pipeline.manifest.by_kind("artifact")
    flagged_by_stage1 = sum(
        bool(pipeline.hcd[e.document_id]["excerpts"]) for e in artifacts
    )
    benign = sum(
        not pipeline.hcd[e.document_id]["malicious"] for e in artifacts
    )
    ok = (
        clean_malicious == 0
        and flagged_by_stage1 == len(artifacts)
        and benign / len(artifacts) >= 0.90
    )
    announce(7, ok, (
        f"false positives: {clean_malicious}/{N_CLEAN} clean malicious, "
        f"{flagged_by_stage1}/{len(artifacts)} artifacts reach stage 2, "
        f"{benign}/{len(artifacts)} labeled benign there"
    ))


def test_criterion_08_taxonomy_exactness(announce, pipeline, tmp_path):
    mismatches = 0
    combined_seen = 0
    for entry in pipeline.manifest.by_kind("injected"):
        label = classify_payload(entry.payload_text)
        combined_seen += label.subtype == "Combined"
        if (label.top_level, label.subtype) != (entry.top_level, entry.subtype):
            mismatches += 1

    # a corpus drawn 90% Data / 10% Instruction, classified via the CLI
    cells = [
        ("ColorBased", ("Data", "Skills")),
        ("SizeBased", ("Data", "Experience")),
        ("PositionBased", ("Data", "Education")),
        ("LayerBased", ("Data", "JobRequirements")),
        ("ColorBased", ("Data", "Mixed")),
        ("SizeBased", ("Data", "Skills")),
        ("PositionBased", ("Data", "Experience")),
        ("LayerBased", ("Data", "Education")),
        ("ColorBased", ("Data", "JobRequirements")),
        ("SizeBased", ("Instruction", "Naive")),
    ]
    build_corpus(
        tmp_path / "mix", clean=0, per_cell=3, artifacts=0, seed=SEED,
        cells=cells,
    )
    scan_path = tmp_path / "scan.jsonl"
    tax_path = tmp_path / "tax.jsonl"
    assert cli_main([
        "scan", "--in", str(tmp_path / "mix" / "docs"),
        "--out", str(scan_path),
    ]) == 0
    assert cli_main([
        "classify", "--scan", str(scan_path), "--out", str(tax_path),
    ]) == 0
    summary = read_jsonl(tax_path)[-1]
    top = summary["distribution"]["top_level"]
    data_fraction = top.get("Data", {}).get("fraction", 0.0)
    instruction_fraction = top.get("Instruction", {}).get("fraction", 0.0)

    ok = (
        mismatches == 0
        and combined_seen >= N_PER_CELL  # every Combined-cell payload
        and data_fraction == 0.9
        and instruction_fraction == 0.1
    )
    announce(8, ok, (
        f"taxonomy: {N_INJECTED - mismatches}/{N_INJECTED} subtypes recovered "
        f"({combined_seen} Combined), 90/10 corpus reports "
        f"Data={data_fraction} Instruction={instruction_fraction}"
    ))


def test_criterion_09_determinism(announce, pipeline, pipeline_repeat):
    first_docs = sorted((pipeline.base / "corpus" / "docs").glob("*.pdf"))
    second_root = pipeline_repeat.base / "corpus" / "docs"
    identical_pdfs = sum(
        doc.read_bytes() == (second_root / doc.name).read_bytes()
        for doc in first_docs
    )
    manifest_equal = reports_equal_modulo_header(
        pipeline.base / "corpus" / "manifest.jsonl",
        pipeline_repeat.base / "corpus" / "manifest.jsonl",
    )
    hcd_equal = reports_equal_modulo_header(
        pipeline.hcd_path, pipeline_repeat.hcd_path
    )
    vda_equal = reports_equal_modulo_header(
        pipeline.vda_path, pipeline_repeat.vda_path
    )
    tax_equal = reports_equal_modulo_header(
        pipeline.tax_path, pipeline_repeat.tax_path
    )
    ok = (
        identical_pdfs == len(first_docs) == 600
        and manifest_equal and hcd_equal and vda_equal and tax_equal
    )
    announce(9, ok, (
        f"determinism: {identical_pdfs}/{len(first_docs)} PDFs byte-identical, "
        f"manifest={manifest_equal} hcd={hcd_equal} vda={vda_equal} "
        f"taxonomy={tax_equal} (modulo header timestamp)"
    ))


def test_criterion_10_bootstrap_sanity(announce):
    values = [1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0]
    plain = sum(values) / len(values)
    uniform_gap = abs(weighted_rate(values, [1.0] * len(values)) - plain)
    first = bootstrap_rate_interval(values, iterations=1000, seed=29)
    second = bootstrap_rate_interval(values, iterations=1000, seed=29)
    ok = (
        uniform_gap <= 1e-12
        and first == second
        and first[0] <= plain <= first[1]
    )
    announce(10, ok, (
        f"bootstrap: uniform-weight gap {uniform_gap:.1e}, fixed-seed interval "
        f"[{first[0]:.4f}, {first[1]:.4f}] reproducible and contains "
        f"rate {plain:.4f}"
    ))


def test_criterion_11_stage1_throughput(announce, tmp_path):
    build_corpus(
        tmp_path / "plain", clean=100, per_cell=0, artifacts=0, seed=SEED
    )
    out = tmp_path / "stage1.jsonl"
    started = time.perf_counter()
    rc = cli_main([
        "scan", "--in", str(tmp_path / "plain" / "docs"),
        "--out", str(out), "--stage1-only",
    ])
    elapsed = time.perf_counter() - started
    timings = read_jsonl(f"{out}.timings.jsonl")
    ok = (
        rc == 0
        and elapsed < 120.0
        and len(timings) == 100
        and all("seconds" in row for row in timings)
    )
    announce(11, ok, (
        f"throughput: 100 single-page documents in {elapsed:.1f}s "
        f"stage-1-only, per-document wall times recorded"
    ))
