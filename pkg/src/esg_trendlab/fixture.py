"""Deterministic synthetic corpus with planted, testable structure.

Twelve companies (four per service area) publish one report per year,
2017-2020. Every topic occurs at least once in every document, which pins
the smooth idf of every topic at exactly 1 and every document is padded to
the same token count, so a topic's weight is exactly count / doc_tokens.
That makes the planted orderings below hold by arithmetic, not by luck:

* each sector leans on two marker topics (counts graded within the sector,
  position 0 is the sector's pioneer);
* three noise topics vary with no sector pattern;
* the artificial-intelligence topic grows every year in every document;
* climate-change mentions decay and wellness mentions grow for most of the
  population while four anchor companies hold the per-year extremes fixed,
  which drives the normalized E mean down and the S mean up monotonically.

All counts are closed-form in (sector, position, topic, year); the seed
only shuffles filler words between topic phrases.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

import numpy as np

from .corpus import load_acronyms, load_lexicon, normalize_text

YEARS = (2017, 2018, 2019, 2020)
DOC_TOKENS = 320

_SECTORS = ("hardware", "software", "service")
_PREFIX = {"hardware": "hw", "software": "sw", "service": "sv"}

# within each marker pair the primary sorts first alphabetically: identical
# class partitions tie on Gini decrease and the forest resolves ties toward
# the lower column index, so the primary is where the importance mass lands
_PRIMARY_TOPIC = {
    "hardware": "carbon-emissions",
    "software": "data-privacy",
    "service": "community-engagement",
}
_SECONDARY_TOPIC = {
    "hardware": "waste-management",
    "software": "data-security",
    "service": "stakeholder-engagement",
}
# per in-sector position 0..3; position 0 is the pioneer, position 3 the
# sector's quietest reporter
_PRIMARY_COUNTS = {
    "hardware": (20, 12, 7, 6),
    "software": (16, 10, 7, 6),
    "service": (14, 8, 7, 6),
}
_SECONDARY_COUNTS = (4, 4, 3, 3)

_NOISE_TOPICS = ("equity", "human-rights", "governance-ethics")
_NOISE_SALT = {"equity": 0, "human-rights": 1, "governance-ethics": 2}
# anchor companies hold constant noise counts so the per-year min/max of the
# E and S dimension sums never move
_PINNED_NOISE = {"hw1": 2, "sw1": 2, "hw4": 1, "sv4": 2}

_E_DECAY = (6, 4, 2, 0)  # climate-change extra for everyone but the two anchors
_S_GROWTH = (2, 4, 6, 8)  # wellness extra for everyone but the two anchors

_DISPLAY = {
    "hw1": "Voltacore",
    "hw2": "Chipforge",
    "hw3": "Ferrosil",
    "hw4": "Quantaleaf",
    "sw1": "Codexia",
    "sw2": "Bytehaven",
    "sw3": "Stacklume",
    "sw4": "Appcrest",
    "sv1": "Cloudporter",
    "sv2": "Netledger",
    "sv3": "Hostwise",
    "sv4": "Deskbridge",
}
_COUNTRIES = ("US", "DE", "JP", "GB", "CA", "SE")

_FILLERS = (
    "annual",
    "review",
    "overview",
    "section",
    "quarter",
    "fiscal",
    "results",
    "teams",
    "sites",
    "plans",
    "goals",
    "notes",
    "tables",
    "pages",
    "during",
    "across",
    "within",
    "ongoing",
    "progress",
    "targets",
)


def company_ids() -> list[str]:
    return [f"{_PREFIX[s]}{p + 1}" for s in _SECTORS for p in range(4)]


def sector_of(company_id: str) -> str:
    return {v: k for k, v in _PREFIX.items()}[company_id[:2]]


def planted_count(company_id: str, topic_id: str, year: int) -> int:
    """Closed-form occurrence count for (company, topic, year)."""
    sector = sector_of(company_id)
    position = int(company_id[2:]) - 1
    tau = year - YEARS[0]
    if topic_id == _PRIMARY_TOPIC[sector]:
        return _PRIMARY_COUNTS[sector][position]
    if topic_id == _SECONDARY_TOPIC[sector]:
        return _SECONDARY_COUNTS[position]
    if topic_id == "artificial-intelligence":
        return 3 + 3 * tau
    if topic_id == "artificial-intelligence-ethics":
        return 1 + tau
    if topic_id == "climate-change":
        if company_id in ("hw1", "sv4"):  # E-dimension max and min anchors
            return 1
        return 1 + _E_DECAY[tau]
    if topic_id == "wellness":
        if company_id == "sw1":  # S-dimension max anchor, held at the cap
            return 1 + _S_GROWTH[-1]
        if company_id == "hw4":  # S-dimension min anchor
            return 1
        return 1 + _S_GROWTH[tau]
    if topic_id in _NOISE_TOPICS:
        if company_id in _PINNED_NOISE:
            return _PINNED_NOISE[company_id]
        return 1 + (position + tau + _NOISE_SALT[topic_id]) % 3
    return 1


def _emitted_occurrences(company_id: str, year: int, topic_ids) -> dict[str, int]:
    """Phrase emissions per topic; the AI-ethics trigram also matches the AI
    bigram, so the AI phrase itself is emitted count(ai) - count(ethics) times."""
    emitted = {t: planted_count(company_id, t, year) for t in topic_ids}
    emitted["artificial-intelligence"] -= emitted["artificial-intelligence-ethics"]
    if any(v < 0 for v in emitted.values()):
        raise AssertionError("negative emission count; planted table is inconsistent")
    return emitted


def _render_text(words: list[str]) -> str:
    """Sentence-dressed rendering whose normalization returns exactly words."""
    lines = []
    for i in range(0, len(words), 9):
        chunk = words[i : i + 9]
        chunk[0] = chunk[0][0].upper() + chunk[0][1:]
        lines.append(" ".join(chunk) + ".")
    return "\n".join(lines) + "\n"


def _build_document(
    company_id: str, year: int, lexicon, acronyms, rng: np.random.Generator
) -> str:
    words: list[str] = [_DISPLAY[company_id], "publishes", "this", "ESG", "review", str(year)]
    emitted = _emitted_occurrences(company_id, year, [t.topic_id for t in lexicon.topics])
    for topic in lexicon.topics:
        phrase = list(topic.phrases[0])
        if topic.topic_id == "artificial-intelligence-ethics":
            phrase = ["artificial", "intelligence", "ethics"]
        for _ in range(emitted[topic.topic_id]):
            words.extend(phrase)
            words.append(_FILLERS[rng.integers(len(_FILLERS))])
    deficit = DOC_TOKENS - len(normalize_text(" ".join(words), acronyms))
    if deficit < 0:
        raise AssertionError(f"document for {company_id}/{year} overflows DOC_TOKENS")
    words.extend(_FILLERS[rng.integers(len(_FILLERS))] for _ in range(deficit))
    text = _render_text(words)
    assert len(normalize_text(text, acronyms)) == DOC_TOKENS
    return text


def ground_truth() -> dict:
    """The planted structure that the acceptance suite checks against."""
    companies = {}
    for cid in company_ids():
        position = int(cid[2:]) - 1
        companies[cid] = {
            "service_area": sector_of(cid),
            "display_name": _DISPLAY[cid],
            "role": "pioneer" if position == 0 else ("shadow" if position == 3 else "regular"),
        }
    return {
        "years": list(YEARS),
        "doc_tokens": DOC_TOKENS,
        "companies": companies,
        "pioneers": ["hw1", "sw1", "sv1"],
        "shadows": ["hw4", "sw4", "sv4"],
        "sector_topics": {
            s: [_PRIMARY_TOPIC[s], _SECONDARY_TOPIC[s]] for s in _SECTORS
        },
        "noise_topics": list(_NOISE_TOPICS),
        "ai_topic": "artificial-intelligence",
        "breakpoint_year": YEARS[0],
        "planted_top5_2020": ["hw1", "sw1", "sv1", "hw2", "sw2"],
        "across_class_winners": {s: f"{_PREFIX[s]}1" for s in _SECTORS},
        "esg_drift": {"e": "decreasing", "s": "increasing"},
    }


def generate_fixture(out_dir: str | Path, seed: int = 42) -> Path:
    """Write the synthetic corpus, its config and its ground truth.

    Layout under out_dir: manifest.csv, reports/<company>_<year>.txt (48
    files), lexicon.json, acronyms.json, config.json, ground_truth.json.
    Identical (out_dir-independent) bytes for identical seeds.
    """
    out_dir = Path(out_dir)
    (out_dir / "reports").mkdir(parents=True, exist_ok=True)
    package_data = Path(__file__).parent / "data"
    lexicon_text = (package_data / "lexicon.json").read_text(encoding="utf-8")
    acronyms_text = (package_data / "acronyms.json").read_text(encoding="utf-8")
    (out_dir / "lexicon.json").write_text(lexicon_text, encoding="utf-8")
    (out_dir / "acronyms.json").write_text(acronyms_text, encoding="utf-8")
    lexicon = load_lexicon(out_dir / "lexicon.json")
    acronyms = load_acronyms(out_dir / "acronyms.json")

    rows = ["company_id,display_name,service_area,country,industry,year,path"]
    for i, cid in enumerate(sorted(company_ids())):
        for year in YEARS:
            rng = np.random.default_rng(np.random.SeedSequence([seed, i, year]))
            text = _build_document(cid, year, lexicon, acronyms, rng)
            rel = f"reports/{cid}_{year}.txt"
            (out_dir / rel).write_text(text, encoding="utf-8")
            rows.append(
                f"{cid},{_DISPLAY[cid]},{sector_of(cid)},"
                f"{_COUNTRIES[i % len(_COUNTRIES)]},technology,{year},{rel}"
            )
    (out_dir / "manifest.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")

    truth = {"seed": seed, **ground_truth()}
    (out_dir / "ground_truth.json").write_text(
        json.dumps(truth, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    config = {
        "manifest": "manifest.csv",
        "lexicon": "lexicon.json",
        "acronyms": "acronyms.json",
        "out_dir": "out",
        "seed": seed,
    }
    (out_dir / "config.json").write_text(
        json.dumps(config, indent=2) + "\n", encoding="utf-8"
    )
    return out_dir


def expected_count_matrix(year: int) -> tuple[list[str], Mapping[str, dict[str, int]]]:
    """Planted counts for every company in one year (for tests/diagnostics)."""
    lexicon = load_lexicon(Path(__file__).parent / "data" / "lexicon.json")
    ids = sorted(company_ids())
    return ids, {
        cid: {t: planted_count(cid, t, year) for t in lexicon.topic_ids} for cid in ids
    }
