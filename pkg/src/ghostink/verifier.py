"""Stage 2: semantic verification of candidate excerpts.

Stage 1 asks "is this text visually hidden?"; this stage asks "is the
hidden text trying to manipulate screening?". Two interchangeable
backends answer it:

* the heuristic verifier, an offline rule cascade over the shared
  pattern families (furniture first, then malicious families);
* a remote model backend driven by a versioned prompt.

Both produce the same verdict shape, so detectors and reports never
care which one ran.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from ghostink import patterns
from ghostink.backend import BackendConfig, RemoteBackend, TokenUsage
from ghostink.errors import MalformedBackendResponseError
from ghostink.stage1 import CandidateExcerpt

LABEL_BENIGN = 0
LABEL_MALICIOUS = 1


@dataclass(frozen=True, slots=True)
class ExcerptVerdict:
    excerpt_id: str
    document_id: str
    page_index: int
    bbox: tuple[float, float, float, float]
    element_ids: tuple[str, ...]
    text: str
    flags: tuple[str, ...]
    label: int
    rationale: str
    backend: str


@dataclass(slots=True)
class DetectionVerdict:
    """Document-level outcome for one detector."""

    document_id: str
    detector: str
    malicious: bool
    excerpts: list[ExcerptVerdict] = field(default_factory=list)
    wall_time_s: float = 0.0
    usage: TokenUsage = field(default_factory=TokenUsage)
    error: str | None = None


def load_prompt(name: str, version: str = "v1") -> str:
    ref = resources.files("ghostink.prompts").joinpath(f"{name}_{version}.txt")
    return ref.read_text(encoding="utf-8")


def heuristic_verdict(text: str) -> tuple[int, str]:
    """Rule-cascade judgment on hidden text.

    Furniture patterns run first so stamps and page numbers can never be
    escalated by the broader malicious families; after that, any
    instruction family, a smuggled skill list, or qualification language
    marks the excerpt malicious.
    """
    flat = patterns.normalize_text(text)
    if patterns.looks_like_furniture(flat):
        return LABEL_BENIGN, "document furniture (numbering, stamp, or boilerplate)"
    families = patterns.instruction_families(flat)
    if "context_ignoring" in families:
        return LABEL_MALICIOUS, "orders the reader to ignore prior instructions"
    if "fake_completion" in families:
        return LABEL_MALICIOUS, "fakes screening status or completion"
    if "directive" in families:
        return LABEL_MALICIOUS, "directs the screening outcome"
    if patterns.has_skill_list(flat):
        return LABEL_MALICIOUS, "smuggles a hidden skill or technology list"
    if patterns.has_qualification_language(flat) or patterns.JOB_REQUIREMENT_CUES.search(flat):
        return LABEL_MALICIOUS, "smuggles hidden qualification or requirement claims"
    return LABEL_BENIGN, "no manipulation pattern in hidden text"


class HeuristicVerifier:
    """Offline verifier; deterministic and free."""

    name = "heuristic"

    def verify(self, excerpt: CandidateExcerpt) -> ExcerptVerdict:
        label, rationale = heuristic_verdict(excerpt.text)
        return _verdict(excerpt, label, rationale, self.name)

    @property
    def usage(self) -> TokenUsage:
        return TokenUsage()


class RemoteVerifier:
    """Model-backed verifier using the versioned excerpt prompt."""

    name = "remote"

    def __init__(self, config: BackendConfig | None = None, transport=None):
        self.config = config or BackendConfig()
        self.backend = RemoteBackend(self.config, transport)
        self.system_prompt = load_prompt("verifier", self.config.prompt_version)

    @property
    def usage(self) -> TokenUsage:
        return self.backend.usage

    def verify(self, excerpt: CandidateExcerpt) -> ExcerptVerdict:
        user = json.dumps({
            "hidden_text": excerpt.text,
            "visual_flags": list(excerpt.flags),
            "page_index": excerpt.page_index,
        }, sort_keys=True)
        reply = self.backend.chat_json(self.system_prompt, user)
        label = reply.get("malicious")
        if label not in (0, 1):
            raise MalformedBackendResponseError(
                f"verifier reply lacks a 0/1 'malicious' field: {reply!r}"
            )
        rationale = str(reply.get("rationale", ""))
        return _verdict(excerpt, int(label), rationale, self.name)


def _verdict(
    excerpt: CandidateExcerpt, label: int, rationale: str, backend: str
) -> ExcerptVerdict:
    return ExcerptVerdict(
        excerpt_id=excerpt.excerpt_id,
        document_id=excerpt.document_id,
        page_index=excerpt.page_index,
        bbox=excerpt.bbox,
        element_ids=excerpt.element_ids,
        text=excerpt.text,
        flags=excerpt.flags,
        label=label,
        rationale=rationale,
        backend=backend,
    )


def classify_document(
    document_id: str,
    excerpt_verdicts: list[ExcerptVerdict],
    detector: str = "hcd",
) -> DetectionVerdict:
    """Fold excerpt verdicts into the document verdict: malicious when
    any excerpt is."""
    return DetectionVerdict(
        document_id=document_id,
        detector=detector,
        malicious=any(v.label == LABEL_MALICIOUS for v in excerpt_verdicts),
        excerpts=list(excerpt_verdicts),
    )
