"""Detection and measurement toolkit for hidden prompt injections in
PDF resumes.

Two independent detectors run over the same documents: a hidden-content
detector (rule-based visual screening plus a semantic verifier) and a
visual discrepancy analyzer (parser view against rendered pixels). An
injection engine builds adversarial corpora with ground truth, a
two-stage taxonomy names what was hidden, and the metrics module turns
paired verdicts into agreement, precision, prevalence, and exposure
numbers with proper intervals.
"""

__version__ = "0.1.0"

from ghostink.document import (
    DocumentHandle,
    RgbColor,
    TextElement,
    extract_elements,
    load_document,
    remove_element,
)
from ghostink.stage1 import AnalyzerThresholds, run_stage1
from ghostink.taxonomy import TaxonomyLabel, classify_payload
from ghostink.vda import VdaConfig, detect_discrepancies, vda_verdict, visibility_oracle
from ghostink.verifier import HeuristicVerifier, RemoteVerifier, classify_document

__all__ = [
    "__version__",
    "DocumentHandle",
    "RgbColor",
    "TextElement",
    "extract_elements",
    "load_document",
    "remove_element",
    "AnalyzerThresholds",
    "run_stage1",
    "TaxonomyLabel",
    "classify_payload",
    "VdaConfig",
    "detect_discrepancies",
    "vda_verdict",
    "visibility_oracle",
    "HeuristicVerifier",
    "RemoteVerifier",
    "classify_document",
]
