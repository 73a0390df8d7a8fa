"""Resume templates for corpus generation.

Three layouts with different hiding surfaces: a single-column classic
page, a two-column layout with a colored sidebar, and a compact
two-page resume. Every visible element obeys the legibility contract
(at least 9pt type, fill color far from its local background, ordinary
ink coverage), so a detector that flags a template element has a false
positive, not a corpus artifact.

Each template exposes payload slots: whitespace bands where an injector
can place hidden content without touching visible elements.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ghostink.errors import TemplateNotFoundError
from ghostink.pdf.fonts import string_width
from ghostink.pdf.writer import DocumentWriter

TEMPLATE_NAMES = ("classic", "two_column", "compact")

PAGE_W = 612.0
PAGE_H = 792.0

_FIRST = (
    "Jordan", "Avery", "Morgan", "Riley", "Casey", "Quinn", "Rowan",
    "Taylor", "Emerson", "Skyler", "Devon", "Harper",
)
_LAST = (
    "Alvarez", "Bennett", "Castillo", "Donovan", "Ellison", "Fraser",
    "Grant", "Hollis", "Iverson", "Jennings", "Keller", "Lindqvist",
)
_TITLES = (
    "Software Engineer", "Data Engineer", "Product Manager",
    "Site Reliability Engineer", "Machine Learning Engineer",
    "Business Analyst", "Platform Engineer",
)
_COMPANIES = (
    "Northwind Labs", "Bluepeak Systems", "Cobalt Analytics",
    "Harborview Tech", "Summit Grid", "Lumen Forge", "Atlas Relay",
)
_SCHOOLS = (
    "State University", "Riverside Institute of Technology",
    "Lakeshore College", "Meridian University",
)
_SKILL_LINES = (
    "Python, SQL, Docker, Kubernetes, AWS",
    "Java, Spring, PostgreSQL, Kafka, GCP",
    "TypeScript, React, Node, Terraform, Azure",
    "Go, Linux, Prometheus, Grafana, Ansible",
)
_BULLETS = (
    "Shipped quarterly platform releases with measurable latency wins",
    "Partnered with design and data teams on roadmap planning",
    "Cut infrastructure spend through workload right-sizing",
    "Introduced code review standards adopted across three teams",
    "Automated deployment pipelines reducing release friction",
    "Improved on-call health by burning down recurring alerts",
)

INK = (34, 34, 34)          # near-black body text
ACCENT = (47, 84, 150)      # heading blue
SIDEBAR = (52, 73, 94)      # sidebar ground
SIDEBAR_TEXT = (255, 255, 255)


@dataclass(slots=True)
class PayloadSlot:
    """A whitespace band able to host hidden content."""

    page_index: int
    x: float
    baseline_y: float
    width: float


@dataclass(slots=True)
class TemplateDoc:
    name: str
    writer: DocumentWriter
    slots: list[PayloadSlot]
    page_sizes: list[tuple[float, float]]


def _person(rng: random.Random) -> dict[str, str]:
    return {
        "name": f"{rng.choice(_FIRST)} {rng.choice(_LAST)}",
        "title": rng.choice(_TITLES),
        "email_seed": f"{rng.randint(100, 999)}",
        "company_a": rng.choice(_COMPANIES),
        "company_b": rng.choice(_COMPANIES),
        "school": rng.choice(_SCHOOLS),
        "skills": rng.choice(_SKILL_LINES),
    }


def _contact_line(person: dict[str, str]) -> str:
    handle = person["name"].lower().replace(" ", ".")
    return f"{handle}{person['email_seed']} at mailhost dot example"


def build_template(name: str, rng: random.Random) -> TemplateDoc:
    if name == "classic":
        return _classic(rng)
    if name == "two_column":
        return _two_column(rng)
    if name == "compact":
        return _compact(rng)
    raise TemplateNotFoundError(
        f"unknown template {name!r}; available: {', '.join(TEMPLATE_NAMES)}"
    )


def _heading(page, x: float, y: float, label: str) -> None:
    page.text(x, y, label, font="Helvetica-Bold", size=11.5, color=ACCENT)


def _bullets(page, x: float, y: float, rng: random.Random, count: int) -> float:
    for line in rng.sample(_BULLETS, count):
        page.text(x, y, "- " + line, size=10, color=INK)
        y -= 14
    return y


def _classic(rng: random.Random) -> TemplateDoc:
    person = _person(rng)
    writer = DocumentWriter()
    page = writer.add_page(PAGE_W, PAGE_H)
    x = 72.0
    page.text(x, 730, person["name"], font="Helvetica-Bold", size=18, color=INK)
    page.text(x, 712, person["title"], size=11, color=INK)
    page.text(x, 697, _contact_line(person), size=9, color=INK)

    _heading(page, x, 668, "SUMMARY")
    page.text(x, 652, f"{person['title']} focused on dependable delivery and", size=10, color=INK)
    page.text(x, 638, "clear communication across product teams.", size=10, color=INK)

    _heading(page, x, 610, "EXPERIENCE")
    page.text(x, 594, f"{person['title']}, {person['company_a']}", font="Helvetica-Bold", size=10.5, color=INK)
    y = _bullets(page, x + 10, 578, rng, 3)
    page.text(x, y - 6, f"Engineer, {person['company_b']}", font="Helvetica-Bold", size=10.5, color=INK)
    y = _bullets(page, x + 10, y - 22, rng, 2)

    _heading(page, x, y - 16, "EDUCATION")
    page.text(x, y - 32, f"B.S., {person['school']}", size=10, color=INK)

    _heading(page, x, y - 60, "SKILLS")
    page.text(x, y - 76, person["skills"], size=10, color=INK)

    return TemplateDoc(
        name="classic",
        writer=writer,
        slots=[
            PayloadSlot(0, 72.0, 120.0, 468.0),
            PayloadSlot(0, 72.0, 70.0, 468.0),
            PayloadSlot(0, 300.0, 730.0, 240.0),
        ],
        page_sizes=[(PAGE_W, PAGE_H)],
    )


def _two_column(rng: random.Random) -> TemplateDoc:
    person = _person(rng)
    writer = DocumentWriter()
    page = writer.add_page(PAGE_W, PAGE_H)
    page.fill_rect(0, 0, 180, PAGE_H, SIDEBAR)

    sx = 20.0
    page.text(sx, 740, person["name"].split()[0], font="Helvetica-Bold", size=15, color=SIDEBAR_TEXT)
    page.text(sx, 722, person["name"].split()[1], font="Helvetica-Bold", size=15, color=SIDEBAR_TEXT)
    page.text(sx, 700, person["title"], size=9.5, color=SIDEBAR_TEXT)
    page.text(sx, 670, "CONTACT", font="Helvetica-Bold", size=10, color=SIDEBAR_TEXT)
    page.text(sx, 655, _contact_line(person)[:32], size=9, color=SIDEBAR_TEXT)
    page.text(sx, 620, "SKILLS", font="Helvetica-Bold", size=10, color=SIDEBAR_TEXT)
    sy = 605.0
    for token in person["skills"].split(", "):
        page.text(sx, sy, token, size=9.5, color=SIDEBAR_TEXT)
        sy -= 13

    bx = 204.0
    _heading(page, bx, 730, "PROFILE")
    page.text(bx, 714, "Delivery-minded engineer who keeps systems boring", size=10, color=INK)
    page.text(bx, 700, "and teams informed.", size=10, color=INK)

    _heading(page, bx, 668, "EXPERIENCE")
    page.text(bx, 652, f"{person['title']}, {person['company_a']}", font="Helvetica-Bold", size=10.5, color=INK)
    y = _bullets(page, bx + 10, 636, rng, 3)
    page.text(bx, y - 6, f"Engineer, {person['company_b']}", font="Helvetica-Bold", size=10.5, color=INK)
    y = _bullets(page, bx + 10, y - 22, rng, 3)

    _heading(page, bx, y - 16, "EDUCATION")
    page.text(bx, y - 32, f"B.S., {person['school']}", size=10, color=INK)

    return TemplateDoc(
        name="two_column",
        writer=writer,
        slots=[
            PayloadSlot(0, 204.0, 120.0, 356.0),
            PayloadSlot(0, 204.0, 70.0, 356.0),
            PayloadSlot(0, 380.0, 752.0, 180.0),
        ],
        page_sizes=[(PAGE_W, PAGE_H)],
    )


def _compact(rng: random.Random) -> TemplateDoc:
    person = _person(rng)
    writer = DocumentWriter()
    first = writer.add_page(PAGE_W, PAGE_H)
    x = 72.0
    first.text(x, 736, person["name"], font="Helvetica-Bold", size=16, color=INK)
    first.text(x, 720, f"{person['title']} | {_contact_line(person)}", size=9, color=INK)

    _heading(first, x, 692, "EXPERIENCE")
    y = 676.0
    for company in (person["company_a"], person["company_b"]):
        first.text(x, y, f"{person['title']}, {company}", font="Helvetica-Bold", size=10.5, color=INK)
        y = _bullets(first, x + 10, y - 16, rng, 3) - 10
    _heading(first, x, y - 4, "SKILLS")
    first.text(x, y - 20, person["skills"], size=10, color=INK)

    second = writer.add_page(PAGE_W, PAGE_H)
    _heading(second, x, 730, "EDUCATION")
    second.text(x, 714, f"B.S., {person['school']}", size=10, color=INK)
    _heading(second, x, 684, "INTERESTS")
    second.text(x, 668, "Trail running, amateur radio, community mentoring", size=10, color=INK)

    return TemplateDoc(
        name="compact",
        writer=writer,
        slots=[
            PayloadSlot(1, 72.0, 420.0, 468.0),
            PayloadSlot(1, 72.0, 300.0, 468.0),
            PayloadSlot(0, 72.0, 80.0, 468.0),
        ],
        page_sizes=[(PAGE_W, PAGE_H), (PAGE_W, PAGE_H)],
    )


def wrap_payload(text: str, font: str, size: float, max_width: float) -> list[str]:
    """Greedy word wrap against real font metrics; a single over-long word
    stays on its own line rather than being split."""
    words = text.split()
    lines: list[str] = []
    current = ""
    for word in words:
        candidate = f"{current} {word}".strip()
        if current and string_width(font, candidate, size) > max_width:
            lines.append(current)
            current = word
        else:
            current = candidate
    if current:
        lines.append(current)
    return lines or [""]
