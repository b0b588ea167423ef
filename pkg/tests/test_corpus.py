import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from esg_trendlab.corpus import (
    CompanyMeta,
    TokenizedDoc,
    TopicEntry,
    TopicLexicon,
    build_count_matrix,
    count_topics,
    load_acronyms,
    load_lexicon,
    load_manifest,
    normalize_text,
    read_token_cache,
    tokenize_documents,
    write_token_cache,
)
from esg_trendlab.corpus import DocumentRecord
from esg_trendlab.errors import (
    BadEnum,
    BadLexicon,
    DuplicateCompanyYear,
    MalformedRow,
    MissingFile,
)

ACRONYMS = [
    ("ESG", "environmental social governance"),
    ("AI", "artificial intelligence"),
]


def test_normalize_hand_traced():
    # Expansion happens before lowercasing and URL removal; "on" is dropped
    # by the length filter, "see" survives.
    raw = "ESG & AI ethics: see https://example.com/x?a=1 on www.foo.org/bar."
    out = normalize_text(raw, ACRONYMS)
    assert out == (
        "environmental",
        "social",
        "governance",
        "artificial",
        "intelligence",
        "ethics",
        "see",
    )


def test_normalize_acronym_first_listed_wins():
    pairs = [("AI Act", "artificial intelligence act"), ("AI", "artificial intelligence")]
    assert normalize_text("The AI Act passed", pairs) == (
        "the",
        "artificial",
        "intelligence",
        "act",
        "passed",
    )
    # Reversed priority: "AI" claims its span first, leaving "Act" alone.
    assert normalize_text("The AI Act passed", list(reversed(pairs))) == (
        "the",
        "artificial",
        "intelligence",
        "act",
        "passed",
    )


def test_normalize_acronym_whole_word_and_case():
    assert "artificial" not in normalize_text("OpenAI models", ACRONYMS)
    assert normalize_text("AI2 benchmark", ACRONYMS)[0] == "benchmark"
    # lowercase "ai" is not the acronym and is too short to survive anyway
    assert normalize_text("ai tools", ACRONYMS) == ("tools",)


def test_normalize_url_forms():
    assert normalize_text("see https://a.example/path?q=climate end") == ("see", "end")
    assert normalize_text("ftp://host/file then text") == ("then", "text")
    assert normalize_text("at www.example.org/a,b. done") == ("done",)


def test_normalize_non_alpha_to_space():
    assert normalize_text("net-zero by 2030!") == ("net", "zero")
    assert normalize_text("don't can't") == ("don", "can")


def test_normalize_min_len_and_stopwords():
    assert normalize_text("a an the carbon", min_token_len=1) == ("a", "an", "the", "carbon")
    assert normalize_text("a an the carbon") == ("the", "carbon")
    assert normalize_text("the carbon", stopwords=frozenset({"the"})) == ("carbon",)
    with pytest.raises(ValueError):
        normalize_text("x", min_token_len=0)


@given(st.text(max_size=200))
def test_normalize_output_alphabet(raw):
    for tok in normalize_text(raw, ACRONYMS):
        assert len(tok) >= 3
        assert tok.isascii() and tok.isalpha() and tok == tok.lower()


@given(st.text(max_size=200))
def test_normalize_idempotent_on_own_output(raw):
    once = normalize_text(raw, ACRONYMS)
    again = normalize_text(" ".join(once), ACRONYMS)
    assert once == again


def _lex(*entries):
    return TopicLexicon(topics=tuple(entries))


def test_count_topics_greedy_non_overlapping():
    lex = _lex(
        TopicEntry("carbon-emissions", "Carbon Emissions", "E", (("carbon", "emissions"),))
    )
    doc = TokenizedDoc("d", ("carbon", "emissions", "carbon", "emissions"))
    assert count_topics(doc, lex)["carbon-emissions"] == 2
    doc = TokenizedDoc("d", ("carbon", "carbon", "emissions"))
    assert count_topics(doc, lex)["carbon-emissions"] == 1


def test_count_topics_phrase_order_consumes():
    lex = _lex(TopicEntry("t", "T", "G", (("alpha", "beta"), ("beta", "gamma"))))
    doc = TokenizedDoc("d", ("alpha", "beta", "gamma"))
    # "alpha beta" consumes the beta, so "beta gamma" cannot also match.
    assert count_topics(doc, lex)["t"] == 1


def test_count_topics_cross_topic_sharing():
    lex = _lex(
        TopicEntry("ai", "AI", "G", (("artificial", "intelligence"),)),
        TopicEntry("ai-ethics", "AI Ethics", "G", (("artificial", "intelligence", "ethics"),)),
    )
    doc = TokenizedDoc("d", ("artificial", "intelligence", "ethics"))
    counts = count_topics(doc, lex)
    assert counts == {"ai": 1, "ai-ethics": 1}


def test_count_topics_unigram():
    lex = _lex(TopicEntry("diversity", "Diversity", "S", (("diversity",), ("inclusion",))))
    doc = TokenizedDoc("d", ("diversity", "and", "inclusion", "diversity"))
    assert count_topics(doc, lex)["diversity"] == 3


def test_build_count_matrix_shape_and_zeros():
    lex = _lex(
        TopicEntry("b-topic", "B", "E", (("beta",),)),
        TopicEntry("a-topic", "A", "S", (("alpha",),)),
    )
    docs = [
        TokenizedDoc("c1-2020", ("alpha", "alpha", "filler")),
        TokenizedDoc("c2-2020", ("beta",)),
        TokenizedDoc("c3-2020", ("gamma", "gamma")),
    ]
    m = build_count_matrix(docs, lex, year=2020, row_ids=["c1", "c2", "c3"])
    assert m.topic_ids == ("a-topic", "b-topic")  # sorted columns
    assert m.row_ids == ("c1", "c2", "c3")
    assert m.counts.tolist() == [[2, 0], [0, 1], [0, 0]]
    assert m.doc_token_counts.tolist() == [3, 1, 2]
    assert m.year == 2020


def test_lexicon_validation():
    good = TopicEntry("ok", "Ok", "E", (("carbon",),))
    with pytest.raises(BadLexicon):
        _lex(good, TopicEntry("ok", "Dup", "S", (("dup",),)))
    with pytest.raises(BadLexicon):
        _lex(TopicEntry("x", "X", "Q", (("carbon",),)))
    with pytest.raises(BadLexicon):
        _lex(TopicEntry("x", "X", "E", ()))
    with pytest.raises(BadLexicon):
        _lex(TopicEntry("x", "X", "E", (("no",),)))  # too short
    with pytest.raises(BadLexicon):
        _lex(TopicEntry("x", "X", "E", (("Carbon",),)))  # not lowercase
    with pytest.raises(BadLexicon):
        _lex(TopicEntry("x", "X", "E", (("one", "two", "three", "four", "five"),)))


def test_packaged_lexicon_loads():
    from pathlib import Path

    import esg_trendlab

    path = Path(esg_trendlab.__file__).parent / "data" / "lexicon.json"
    assert len(json.loads(path.read_text())) == 21
    lex = load_lexicon(path)
    dims = [t.dimension for t in lex.topics]
    assert dims.count("E") == 7 and dims.count("S") == 7 and dims.count("G") == 7


MANIFEST_HEADER = "company_id,display_name,service_area,country,industry,year,path\n"


def _write_manifest(tmp_path, rows, texts=None):
    for name, content in (texts or {}).items():
        (tmp_path / name).write_text(content, encoding="utf-8")
    p = tmp_path / "manifest.csv"
    p.write_text(MANIFEST_HEADER + "".join(r + "\n" for r in rows), encoding="utf-8")
    return p


def test_load_manifest_roundtrip(tmp_path):
    p = _write_manifest(
        tmp_path,
        [
            "acme,Acme Corp,hardware,US,Semiconductors,2020,a2020.txt",
            "acme,Acme Corp,hardware,US,Semiconductors,2021,a2021.txt",
            "beta,Beta Inc,software,DE,Software,2020,b2020.txt",
        ],
        texts={
            "a2020.txt": "carbon emissions report",
            "a2021.txt": "more carbon emissions",
            "b2020.txt": "data privacy first",
        },
    )
    companies, records = load_manifest(p)
    assert [c.company_id for c in companies] == ["acme", "beta"]
    assert companies[0] == CompanyMeta("acme", "Acme Corp", "hardware", "US", "Semiconductors")
    assert [(r.company_id, r.year) for r in records] == [
        ("acme", 2020),
        ("acme", 2021),
        ("beta", 2020),
    ]
    assert records[2].raw_text == "data privacy first"
    assert records[0].doc_id == "acme-2020"


def test_load_manifest_missing_manifest(tmp_path):
    with pytest.raises(MissingFile):
        load_manifest(tmp_path / "nope.csv")


def test_load_manifest_missing_text(tmp_path):
    p = _write_manifest(tmp_path, ["acme,Acme,hardware,US,Semis,2020,gone.txt"])
    with pytest.raises(MissingFile):
        load_manifest(p)


def test_load_manifest_duplicate_company_year(tmp_path):
    p = _write_manifest(
        tmp_path,
        [
            "acme,Acme,hardware,US,Semis,2020,a.txt",
            "acme,Acme,hardware,US,Semis,2020,a.txt",
        ],
        texts={"a.txt": "x"},
    )
    with pytest.raises(DuplicateCompanyYear):
        load_manifest(p)


def test_load_manifest_bad_service_area(tmp_path):
    p = _write_manifest(tmp_path, ["acme,Acme,consulting,US,Semis,2020,a.txt"], texts={"a.txt": "x"})
    with pytest.raises(BadEnum):
        load_manifest(p)


def test_load_manifest_malformed_rows(tmp_path):
    p = _write_manifest(tmp_path, ["acme,Acme,hardware,US,Semis,twenty,a.txt"], texts={"a.txt": "x"})
    with pytest.raises(MalformedRow):
        load_manifest(p)
    p = _write_manifest(tmp_path, ["acme,,hardware,US,Semis,2020,a.txt"], texts={"a.txt": "x"})
    with pytest.raises(MalformedRow):
        load_manifest(p)
    # same company with diverging metadata across rows
    p = _write_manifest(
        tmp_path,
        [
            "acme,Acme,hardware,US,Semis,2020,a.txt",
            "acme,Acme Corp,hardware,US,Semis,2021,a.txt",
        ],
        texts={"a.txt": "x"},
    )
    with pytest.raises(MalformedRow):
        load_manifest(p)
    bad = tmp_path / "badheader.csv"
    bad.write_text("id,year,path\n", encoding="utf-8")
    with pytest.raises(MalformedRow):
        load_manifest(bad)


def test_token_cache_roundtrip(tmp_path):
    records = [
        DocumentRecord("c1-2020", "c1", 2020, "carbon emissions now"),
        DocumentRecord("c2-2021", "c2", 2021, "data privacy"),
    ]
    docs = tokenize_documents(records)
    path = tmp_path / "tokens.jsonl"
    write_token_cache(docs, records, path)
    lines = path.read_text().splitlines()
    assert json.loads(lines[0]) == {
        "doc_id": "c1-2020",
        "company_id": "c1",
        "year": 2020,
        "tokens": ["carbon", "emissions", "now"],
    }
    back = read_token_cache(path)
    assert [(d.doc_id, d.tokens) for d, _, _ in back] == [
        ("c1-2020", ("carbon", "emissions", "now")),
        ("c2-2021", ("data", "privacy")),
    ]
    assert [(cid, yr) for _, cid, yr in back] == [("c1", 2020), ("c2", 2021)]


def test_load_acronyms_keeps_order(tmp_path):
    p = tmp_path / "acr.json"
    p.write_text('{"AI Act": "artificial intelligence act", "AI": "artificial intelligence"}')
    assert load_acronyms(p) == [
        ("AI Act", "artificial intelligence act"),
        ("AI", "artificial intelligence"),
    ]
