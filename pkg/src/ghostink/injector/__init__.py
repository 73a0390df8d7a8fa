"""Adversarial corpus generation: payload bank, resume templates, and
the injection engine that hides payloads with guaranteed margins."""

from ghostink.injector.corpus import (
    TECHNIQUES,
    CorpusManifest,
    ManifestEntry,
    build_corpus,
    inject_payload,
)
from ghostink.injector.payloads import PAYLOAD_CELLS, generate_payload, payload_variants
from ghostink.injector.templates import TEMPLATE_NAMES, build_template

__all__ = [
    "TECHNIQUES",
    "CorpusManifest",
    "ManifestEntry",
    "build_corpus",
    "inject_payload",
    "PAYLOAD_CELLS",
    "generate_payload",
    "payload_variants",
    "TEMPLATE_NAMES",
    "build_template",
]
