"""Two-stage taxonomy of hidden-payload content.

Stage A decides the mechanism: Instruction (the payload addresses the
screening system) versus Data (the payload poses as resume content).
Stage B assigns the subtype within that branch. Both stages run as
ordered decision lists over the shared pattern families, so every
non-empty payload receives exactly one label; a remote backend variant
consumes the same prompts the offline rules encode.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from ghostink import patterns
from ghostink.backend import BackendConfig, RemoteBackend
from ghostink.errors import EmptyInputError, MalformedBackendResponseError

TOP_INSTRUCTION = "Instruction"
TOP_DATA = "Data"

INSTRUCTION_SUBTYPES = ("Naive", "ContextIgnoring", "FakeCompletion", "Combined")
DATA_SUBTYPES = ("Skills", "Experience", "Education", "JobRequirements", "Mixed")


@dataclass(frozen=True, slots=True)
class TaxonomyLabel:
    top_level: str
    subtype: str

    def __str__(self) -> str:
        return f"{self.top_level}/{self.subtype}"


def classify_top_level(text: str) -> str:
    """Stage A: Instruction when any instruction family matches."""
    flat = patterns.normalize_text(text)
    return TOP_INSTRUCTION if patterns.instruction_families(flat) else TOP_DATA


def classify_instruction_subtype(text: str) -> str:
    """Stage B, instruction branch. Combined means two or more distinct
    instruction mechanisms appear in one payload."""
    flat = patterns.normalize_text(text)
    families = patterns.instruction_families(flat)
    if len(families) >= 2:
        return "Combined"
    if "context_ignoring" in families:
        return "ContextIgnoring"
    if "fake_completion" in families:
        return "FakeCompletion"
    return "Naive"


def classify_data_subtype(text: str) -> str:
    """Stage B, data branch: an ordered decision list from the most
    specific cue to the fallback.

    Mixed (list plus years-of-experience) outranks everything because its
    parts would individually match Skills or JobRequirements; Education
    and JobRequirements outrank Skills because credential and posting
    language often carries comma lists too.
    """
    flat = patterns.normalize_text(text)
    has_list = patterns.has_skill_list(flat)
    if has_list and patterns.YEARS_OF_EXPERIENCE.search(flat):
        return "Mixed"
    if patterns.EDUCATION_CUES.search(flat):
        return "Education"
    if patterns.JOB_REQUIREMENT_CUES.search(flat):
        return "JobRequirements"
    if has_list or patterns.SKILL_LABEL_CUES.search(flat):
        return "Skills"
    if patterns.ACHIEVEMENT_CUES.search(flat):
        return "Experience"
    return "Skills" if "," in flat else "Experience"


def classify_payload(text: str) -> TaxonomyLabel:
    """Full two-stage classification of one payload text."""
    if not patterns.normalize_text(text):
        raise EmptyInputError("cannot classify empty payload text")
    top = classify_top_level(text)
    if top == TOP_INSTRUCTION:
        return TaxonomyLabel(top, classify_instruction_subtype(text))
    return TaxonomyLabel(top, classify_data_subtype(text))


class RemoteTaxonomist:
    """Backend-driven variant running the same two stages as prompts."""

    name = "remote"

    def __init__(self, config: BackendConfig | None = None, transport=None):
        from ghostink.verifier import load_prompt

        self.config = config or BackendConfig()
        self.backend = RemoteBackend(self.config, transport)
        self.stage_a_prompt = load_prompt("taxonomy_stage_a", self.config.prompt_version)
        self.stage_b_prompt = load_prompt("taxonomy_stage_b", self.config.prompt_version)

    @property
    def usage(self):
        return self.backend.usage

    def classify(self, text: str) -> TaxonomyLabel:
        reply = self.backend.chat_json(
            self.stage_a_prompt, json.dumps({"hidden_text": text})
        )
        top = reply.get("top_level")
        if top not in (TOP_INSTRUCTION, TOP_DATA):
            raise MalformedBackendResponseError(
                f"stage A reply has no valid top_level: {reply!r}"
            )
        reply = self.backend.chat_json(
            self.stage_b_prompt,
            json.dumps({"hidden_text": text, "top_level": top}, sort_keys=True),
        )
        subtype = reply.get("subtype")
        allowed = INSTRUCTION_SUBTYPES if top == TOP_INSTRUCTION else DATA_SUBTYPES
        if subtype not in allowed:
            raise MalformedBackendResponseError(
                f"stage B reply has no valid subtype for {top}: {reply!r}"
            )
        return TaxonomyLabel(top, subtype)


def label_distribution(labels: Iterable[TaxonomyLabel]) -> dict:
    """Counts and fractions by top level and subtype."""
    labels = list(labels)
    if not labels:
        raise EmptyInputError("no labels to summarize")
    total = len(labels)
    top_counts = Counter(label.top_level for label in labels)
    sub_counts = Counter((label.top_level, label.subtype) for label in labels)
    return {
        "total": total,
        "top_level": {
            name: {"count": count, "fraction": count / total}
            for name, count in sorted(top_counts.items())
        },
        "subtype": {
            f"{top}/{sub}": {"count": count, "fraction": count / total}
            for (top, sub), count in sorted(sub_counts.items())
        },
    }
