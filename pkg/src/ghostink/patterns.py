"""Shared text normalization and rule families.

The heuristic verifier and the taxonomy classifier both reason about
the same linguistic signals (context-ignoring commands, fake pipeline
status, screener-directed imperatives, qualification vocabulary, skill
lists, document furniture). Keeping one compiled copy here ensures the
two stages can never disagree about what a family matches.
"""

from __future__ import annotations

import re

_WS = re.compile(r"\s+")


def normalize_text(text: str) -> str:
    """Collapse whitespace and trim; the canonical form for comparing
    extracted excerpt text against an injected payload."""
    return _WS.sub(" ", text).strip()


# -- instruction families ----------------------------------------------------

CONTEXT_IGNORING = re.compile(
    r"\b(ignore|disregard|forget|discard|override)\b"
    r".{0,60}?\b(previous|prior|earlier|above|preceding|all|any)\b"
    r".{0,60}?\b(instructions?|directions?|prompts?|rules?|guidelines?|context)\b",
    re.IGNORECASE | re.DOTALL,
)

FAKE_COMPLETION = re.compile(
    r"\bapproved\s+to\s+(move|proceed|advance)\b"
    r"|\b(screening|review|assessment|evaluation|verification)s?\s+(is\s+|was\s+)?"
    r"(complete|completed|passed|finished|done)\b"
    r"|\b(passed|cleared)\b.{0,40}?\b(screening|review|assessment|checks?|round|stage)\b"
    r"|\b(cleared|approved|qualified)\s+for\s+the\s+next\s+(step|stage|round)\b"
    r"|\bmov(e|es|ed|ing)\s+(on\s+)?to\s+the\s+next\s+(step|stage|round)\b"
    r"|\bcandidate\s+(has\s+been|was)\s+(approved|cleared|pre-?screened)\b",
    re.IGNORECASE | re.DOTALL,
)

DIRECTIVE = re.compile(
    r"\bhire\s+me\b"
    r"|\b(hire|interview|shortlist|select|advance|recommend|approve)\s+(me|him|her|them|this|the)\b"
    r"|\b(must|should)\s+be\s+(hired|selected|shortlisted|interviewed|advanced)\b"
    r"|\b(rate|score|rank)\b.{0,40}?\b(\d+\s*(/|out\s+of)\s*\d+|top|highest|highly|perfect)\b"
    r"|\bsay\s+(this|the)\s+(applicant|candidate)\s+is\b"
    r"|\brecommend\b.{0,40}?\b(hiring|hire|immediate)"
    r"|\bgive\s+(this|the)\s+(candidate|applicant|resume)\b.{0,30}?\b(top|highest|best|perfect)\b",
    re.IGNORECASE | re.DOTALL,
)

INSTRUCTION_FAMILIES = {
    "context_ignoring": CONTEXT_IGNORING,
    "fake_completion": FAKE_COMPLETION,
    "directive": DIRECTIVE,
}


def instruction_families(text: str) -> list[str]:
    """Names of instruction families present, in stable order."""
    return [
        name for name, rx in INSTRUCTION_FAMILIES.items() if rx.search(text)
    ]


# -- qualification vocabulary ------------------------------------------------

YEARS_OF_EXPERIENCE = re.compile(
    r"\b(\d+\+?|one|two|three|four|five|six|seven|eight|nine|ten|twelve|"
    r"fifteen|twenty)\s*\+?\s*(years?|yrs)\b",
    re.IGNORECASE,
)

QUALIFICATION_TERMS = re.compile(
    r"\b(experien\w*|degrees?|certif\w+|bachelor\w*|master'?s?|mba|ph\.?d|"
    r"diploma\w*|credential\w*|associate|professional|proficien\w+|"
    r"expertise|qualif\w+|skilled|licensed?)\b",
    re.IGNORECASE,
)


def has_qualification_language(text: str) -> bool:
    return bool(
        YEARS_OF_EXPERIENCE.search(text) or QUALIFICATION_TERMS.search(text)
    )


# -- skill lists -------------------------------------------------------------

_LIST_SPLIT = re.compile(r"[,;•|]")


def skill_list_items(text: str) -> list[str]:
    """Short comma-ish separated tokens; three or more reads as a list of
    skills or technologies rather than prose."""
    items = []
    for part in _LIST_SPLIT.split(text):
        token = part.strip().rstrip(".")
        if not token:
            continue
        words = token.split()
        if 1 <= len(words) <= 4:
            items.append(token)
    return items


def has_skill_list(text: str) -> bool:
    return len(skill_list_items(text)) >= 3


# -- taxonomy cues for data subtypes ----------------------------------------

EDUCATION_CUES = re.compile(
    r"\b(bachelor\w*|master'?s?\b|master\s+of|mba|ph\.?d|b\.?sc?\.?|m\.?sc?\.?|"
    r"associate|certified|certification|certificate|credential\w*|diploma\w*|"
    r"degree|licensed?|graduate\w*)\b",
    re.IGNORECASE,
)

JOB_REQUIREMENT_CUES = re.compile(
    r"\b(experience\s+(in|with)|must\s+have|required|requirements?|"
    r"qualifications?\s*:|ability\s+to|familiarity\s+with|"
    r"proficiency\s+(in|with)|minimum\s+of|candidates?\s+(must|should))\b",
    re.IGNORECASE,
)

ACHIEVEMENT_CUES = re.compile(
    r"\b(led|managed|developed|delivered|built|drove|drives?|spearheaded|"
    r"foster\w*|mentored|launched|owned|scaled|collaborat\w*|improv\w*|"
    r"increas\w*|reduc\w*|designed|architected|recognized)\b",
    re.IGNORECASE,
)

SKILL_LABEL_CUES = re.compile(
    r"^(skills?|tools?|technologies|tech\s+stack|competencies|build\s+tools|"
    r"languages?|frameworks?|platforms?|databases?|cloud|devops)\s*[:\-]",
    re.IGNORECASE,
)


# -- benign document furniture ----------------------------------------------

_PAGE_NUMBER = re.compile(
    r"^(page\s+\d+(\s*(of|/)\s*\d+)?|\d+(\s*(of|/)\s*\d+)?|-\s*\d+\s*-)$",
    re.IGNORECASE,
)
_BARE_DATE = re.compile(
    r"^(\d{4}-\d{2}-\d{2}|\d{1,2}/\d{1,2}/\d{2,4}|"
    r"(january|february|march|april|may|june|july|august|september|october|"
    r"november|december)\s+\d{1,2},?\s+\d{4})$",
    re.IGNORECASE,
)
_URL_ONLY = re.compile(r"^\[?(https?://|www\.)\S+\]?$", re.IGNORECASE)
_BOILERPLATE = re.compile(
    r"\b(generated\s+(by|with)|created\s+(by|with)|converted\s+(by|with)|"
    r"produced\s+(by|with)|trial\s+version|evaluation\s+copy|unregistered|"
    r"watermark|confidential|draft|do\s+not\s+(copy|distribute)|"
    r"all\s+rights\s+reserved|copyright|©|template\s+(by|©)|"
    r"last\s+(modified|updated|saved)|file\s*name\s*:|\.pdf\b)",
    re.IGNORECASE,
)
_DECORATIVE = re.compile(r"^[\W_•·–—]+$")


def looks_like_furniture(text: str) -> bool:
    """True for text that page-producing software leaves behind: numbering,
    stamps, converter boilerplate, tracking URLs, decorative rules."""
    flat = normalize_text(text)
    if not flat:
        return True
    return bool(
        _PAGE_NUMBER.match(flat)
        or _BARE_DATE.match(flat)
        or _URL_ONLY.match(flat)
        or _DECORATIVE.match(flat)
        or _BOILERPLATE.search(flat)
    )
