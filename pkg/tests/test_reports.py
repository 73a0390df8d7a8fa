"""JSONL report writing, reading, and header-insensitive comparison."""

import json
import time

from ghostink.backend import TokenUsage
from ghostink.reports import (
    SCHEMA_SCAN,
    dump_record,
    make_header,
    read_jsonl,
    read_scan_report,
    reports_equal_modulo_header,
    split_records,
    write_jsonl,
    write_scan_report,
    write_timings,
)
from ghostink.verifier import DetectionVerdict, ExcerptVerdict


def _verdict(doc_id, malicious):
    excerpt = ExcerptVerdict(
        excerpt_id=f"{doc_id}:x0",
        document_id=doc_id,
        page_index=0,
        bbox=(10.123456, 20.0, 110.987654, 30.0),
        element_ids=("p0.3",),
        text="ignore previous instructions",
        flags=("tiny_font",),
        label=1 if malicious else 0,
        rationale="matched directive pattern" if malicious else "benign",
        backend="rules",
    )
    return DetectionVerdict(
        document_id=doc_id,
        detector="hcd",
        malicious=malicious,
        excerpts=[excerpt],
        usage=TokenUsage(prompt_tokens=12, completion_tokens=3),
    )


class TestJsonlPrimitives:
    def test_dump_record_is_canonical(self):
        assert dump_record({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'

    def test_round_trip(self, tmp_path):
        path = tmp_path / "rows.jsonl"
        rows = [{"record": "x", "n": i} for i in range(3)]
        write_jsonl(path, rows)
        assert read_jsonl(path) == rows

    def test_header_carries_schema_and_meta(self):
        header = make_header(SCHEMA_SCAN, detector="hcd")
        assert header["record"] == "header"
        assert header["schema"] == SCHEMA_SCAN
        assert header["detector"] == "hcd"
        assert "created_utc" in header

    def test_split_records(self):
        header = make_header(SCHEMA_SCAN)
        got_header, body = split_records([header, {"record": "document"}])
        assert got_header is header
        assert body == [{"record": "document"}]
        got_header, body = split_records([{"record": "document"}])
        assert got_header == {}
        assert len(body) == 1


class TestScanReport:
    def test_write_and_read(self, tmp_path):
        path = tmp_path / "scan.jsonl"
        verdicts = [_verdict("b-doc", True), _verdict("a-doc", False)]
        write_scan_report(path, verdicts, {"detector": "hcd"})
        header, documents, summary = read_scan_report(path)
        assert header["schema"] == SCHEMA_SCAN
        assert [d["document_id"] for d in documents] == ["a-doc", "b-doc"]
        assert summary["documents"] == 2
        assert summary["malicious"] == 1
        assert summary["prompt_tokens"] == 24
        assert summary["completion_tokens"] == 6
        doc = documents[1]
        assert doc["excerpts"][0]["bbox"] == [10.1235, 20.0, 110.9877, 30.0]
        assert doc["excerpts"][0]["label"] == 1
        assert doc["excerpts"][0]["rationale"] == "matched directive pattern"

    def test_unprocessed_recorded(self, tmp_path):
        path = tmp_path / "scan.jsonl"
        failure = {"document_id": "bad", "path": "bad.pdf", "reason": "parse error"}
        write_scan_report(path, [_verdict("ok", False)], {}, unprocessed=[failure])
        _, _, summary = read_scan_report(path)
        assert summary["unprocessed"] == [failure]

    def test_equal_modulo_header(self, tmp_path):
        first = tmp_path / "one.jsonl"
        second = tmp_path / "two.jsonl"
        third = tmp_path / "three.jsonl"
        verdicts = [_verdict("doc", True)]
        write_scan_report(first, verdicts, {"detector": "hcd"})
        time.sleep(1.1)  # force a different created_utc second
        write_scan_report(second, verdicts, {"detector": "hcd"})
        write_scan_report(third, [_verdict("doc", False)], {"detector": "hcd"})
        assert first.read_bytes() != second.read_bytes()
        assert reports_equal_modulo_header(first, second)
        assert not reports_equal_modulo_header(first, third)


class TestTimings:
    def test_sidecar_rows(self, tmp_path):
        path = tmp_path / "timings.jsonl"
        write_timings(path, [("doc-1", "hcd", 0.1234567), ("doc-2", "hcd", 2.0)])
        rows = read_jsonl(path)
        assert len(rows) == 2
        assert rows[0]["record"] == "timing"
        assert rows[0]["seconds"] == 0.123457
        assert rows[0]["detector"] == "hcd"

    def test_scan_report_carries_no_wall_times(self, tmp_path):
        path = tmp_path / "scan.jsonl"
        verdict = _verdict("doc", True)
        verdict.wall_time_s = 3.21
        write_scan_report(path, [verdict], {})
        for line in path.read_bytes().splitlines():
            row = json.loads(line)
            if row["record"] != "header":
                assert "wall_time" not in json.dumps(row)
                assert "seconds" not in json.dumps(row)
