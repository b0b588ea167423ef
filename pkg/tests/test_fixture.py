import json

import numpy as np
import pytest

from esg_trendlab import fixture
from esg_trendlab.corpus import (
    build_count_matrix,
    load_acronyms,
    load_lexicon,
    load_manifest,
    normalize_text,
    tokenize_documents,
)
from esg_trendlab.scoring import TfidfConfig, compute_tfidf


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixture-corpus")
    fixture.generate_fixture(out, seed=42)
    return out


def test_file_inventory(corpus_dir):
    texts = sorted((corpus_dir / "reports").glob("*.txt"))
    assert len(texts) == 48
    for name in ("manifest.csv", "ground_truth.json", "lexicon.json", "acronyms.json", "config.json"):
        assert (corpus_dir / name).is_file()


def test_manifest_loads_and_covers_the_grid(corpus_dir):
    companies, records = load_manifest(corpus_dir / "manifest.csv")
    assert len(companies) == 12
    assert len(records) == 48
    by_sector = {}
    for c in companies:
        by_sector.setdefault(c.service_area, []).append(c.company_id)
    assert {k: len(v) for k, v in by_sector.items()} == {
        "hardware": 4,
        "software": 4,
        "service": 4,
    }
    assert sorted({r.year for r in records}) == [2017, 2018, 2019, 2020]


def test_documents_have_uniform_token_count(corpus_dir):
    _, records = load_manifest(corpus_dir / "manifest.csv")
    acronyms = load_acronyms(corpus_dir / "acronyms.json")
    for r in records:
        assert len(normalize_text(r.raw_text, acronyms)) == fixture.DOC_TOKENS


def test_counts_match_the_planted_table(corpus_dir):
    _, records = load_manifest(corpus_dir / "manifest.csv")
    lexicon = load_lexicon(corpus_dir / "lexicon.json")
    acronyms = load_acronyms(corpus_dir / "acronyms.json")
    docs = tokenize_documents(records, acronyms)
    for year in fixture.YEARS:
        pairs = [(r, d) for r, d in zip(records, docs) if r.year == year]
        counts = build_count_matrix(
            [d for _, d in pairs],
            lexicon,
            year=year,
            row_ids=[r.company_id for r, _ in pairs],
        )
        _, planted = fixture.expected_count_matrix(year)
        for rid, row in zip(counts.row_ids, counts.counts):
            for topic, got in zip(counts.topic_ids, row):
                assert got == planted[rid][topic], (year, rid, topic)


def test_every_topic_everywhere_pins_idf_at_one(corpus_dir):
    _, records = load_manifest(corpus_dir / "manifest.csv")
    lexicon = load_lexicon(corpus_dir / "lexicon.json")
    acronyms = load_acronyms(corpus_dir / "acronyms.json")
    docs = tokenize_documents(records, acronyms)
    pairs = [(r, d) for r, d in zip(records, docs) if r.year == 2020]
    counts = build_count_matrix(
        [d for _, d in pairs], lexicon, year=2020, row_ids=[r.company_id for r, _ in pairs]
    )
    assert (counts.counts >= 1).all()
    scores = compute_tfidf(counts, TfidfConfig())
    assert np.allclose(scores.weights, counts.counts / fixture.DOC_TOKENS, atol=1e-15)


def test_ground_truth_contents(corpus_dir):
    truth = json.loads((corpus_dir / "ground_truth.json").read_text(encoding="utf-8"))
    assert truth["seed"] == 42
    assert truth["years"] == [2017, 2018, 2019, 2020]
    assert len(truth["companies"]) == 12
    assert truth["pioneers"] == ["hw1", "sw1", "sv1"]
    assert truth["shadows"] == ["hw4", "sw4", "sv4"]
    assert set(truth["sector_topics"]) == {"hardware", "software", "service"}
    assert len(truth["planted_top5_2020"]) == 5
    lexicon = load_lexicon(corpus_dir / "lexicon.json")
    planted_topics = {t for pair in truth["sector_topics"].values() for t in pair}
    planted_topics |= set(truth["noise_topics"]) | {truth["ai_topic"]}
    assert planted_topics <= set(lexicon.topic_ids)


def test_same_seed_identical_bytes(corpus_dir, tmp_path):
    again = tmp_path / "again"
    fixture.generate_fixture(again, seed=42)
    for path in sorted(corpus_dir.rglob("*")):
        if path.is_file():
            twin = again / path.relative_to(corpus_dir)
            assert twin.read_bytes() == path.read_bytes(), path.name


def test_different_seed_changes_text(corpus_dir, tmp_path):
    other = tmp_path / "other"
    fixture.generate_fixture(other, seed=43)
    texts = sorted((corpus_dir / "reports").glob("*.txt"))
    assert any(
        (other / "reports" / p.name).read_bytes() != p.read_bytes() for p in texts
    )
    # counts are seed-independent by design, so ground truth matches
    a = json.loads((corpus_dir / "ground_truth.json").read_text())
    b = json.loads((other / "ground_truth.json").read_text())
    a.pop("seed"), b.pop("seed")
    assert a == b
