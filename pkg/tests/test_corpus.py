import json

import pytest
from hypothesis import given, settings, strategies as st

from citerec.corpus import (CorpusError, extract_cocitations, load_corpus,
                            relevant_set, snapshot)

from conftest import make_corpus, write_corpus_file


def test_load_basic(tmp_path):
    path = write_corpus_file(tmp_path, [
        {"id": "A", "title": "t", "abstract": "", "year": 2015, "references": ["B"]},
        {"id": "B", "title": "t", "abstract": "", "year": 2010, "references": []},
        {"id": "C", "title": "t", "abstract": "", "year": 2018, "references": []},
    ])
    corpus = load_corpus(path)
    assert len(corpus) == 3
    assert corpus.citation_edges == [("A", "B")]
    assert corpus.stats.dangling_references == 0


def test_load_duplicate_id_names_line(tmp_path):
    path = write_corpus_file(tmp_path, [
        {"id": "A", "title": "t", "abstract": "", "year": 2015, "references": []},
        {"id": "A", "title": "t2", "abstract": "", "year": 2016, "references": []},
    ])
    with pytest.raises(CorpusError, match="line 2.*duplicate id"):
        load_corpus(path)


def test_load_dangling_reference_counted(tmp_path):
    path = write_corpus_file(tmp_path, [
        {"id": "A", "title": "t", "abstract": "", "year": 2015, "references": ["Z"]},
    ])
    corpus = load_corpus(path)
    assert corpus.stats.dangling_references == 1
    assert corpus.papers["A"].references == ("Z",)  # kept on the record
    assert corpus.citation_edges == []              # but never an edge


def test_load_missing_field(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(json.dumps({"id": "A", "title": "t", "year": 2000,
                                "references": []}) + "\n")
    with pytest.raises(CorpusError, match="line 1.*abstract"):
        load_corpus(str(path))


def test_load_malformed_line(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text('{"id": "A"\n')
    with pytest.raises(CorpusError, match="line 1"):
        load_corpus(str(path))


def test_load_missing_file():
    with pytest.raises(FileNotFoundError):
        load_corpus("/nonexistent/corpus.jsonl")


def test_load_year_out_of_range(tmp_path):
    path = write_corpus_file(tmp_path, [
        {"id": "A", "title": "t", "abstract": "", "year": 1700, "references": []},
    ])
    with pytest.raises(CorpusError, match="plausible range"):
        load_corpus(path)


def test_self_citation_dropped():
    corpus = make_corpus([("A", 2015, ["A", "B"]), ("B", 2010, [])])
    assert corpus.papers["A"].references == ("B",)
    assert corpus.stats.self_citations_dropped == 1


def test_duplicate_reference_dropped():
    corpus = make_corpus([("A", 2015, ["B", "B"]), ("B", 2010, [])])
    assert corpus.papers["A"].references == ("B",)
    assert corpus.stats.duplicate_references_dropped == 1
    assert corpus.citation_edges == [("A", "B")]


def test_year_anomaly_counted():
    corpus = make_corpus([("A", 2010, ["B"]), ("B", 2015, [])])
    assert corpus.stats.year_anomaly_edges == 1
    assert ("A", "B") in corpus.citation_edges  # tolerated, not dropped


def test_snapshot_filtering(tiny_corpus):
    g = snapshot(tiny_corpus, 2016)
    assert set(g.nodes) == {"A", "B"}
    assert set(g.directed_edges) == {("A", "B")}


def test_snapshot_empty(tiny_corpus):
    g = snapshot(tiny_corpus, 1999)
    assert len(g) == 0
    assert g.directed_edges == ()


def test_snapshot_full(tiny_corpus):
    g = snapshot(tiny_corpus, 2030)
    assert len(g) == 3
    assert len(g.directed_edges) == len(tiny_corpus.citation_edges)


def test_cocitation_basic():
    corpus = make_corpus([
        ("A", 2000, []), ("B", 2001, []),
        ("X", 2020, ["A", "B"]),
    ])
    idx = extract_cocitations(corpus)
    assert idx.first_year("A", "B") == 2020
    assert idx.first_year("B", "A") == 2020  # symmetric lookup


def test_cocitation_min_year():
    corpus = make_corpus([
        ("A", 2000, []), ("B", 2001, []),
        ("X", 2020, ["A", "B"]), ("Y", 2018, ["A", "B"]),
    ])
    idx = extract_cocitations(corpus)
    assert idx.first_year("A", "B") == 2018


def test_cocitation_pair_count():
    # a paper citing 4 resolvable ids contributes C(4,2) = 6 pairs
    corpus = make_corpus([
        ("A", 2000, []), ("B", 2000, []), ("C", 2000, []), ("D", 2000, []),
        ("X", 2010, ["A", "B", "C", "D"]),
    ])
    assert len(extract_cocitations(corpus)) == 6


def brute_force_cocitations(corpus):
    out = {}
    for p in corpus.papers.values():
        refs = [r for r in p.references if r in corpus.papers]
        for a in refs:
            for b in refs:
                if a < b:
                    key = (a, b)
                    if key not in out or p.year < out[key]:
                        out[key] = p.year
    return out


@st.composite
def random_corpora(draw):
    n = draw(st.integers(min_value=1, max_value=30))
    ids = [f"p{i}" for i in range(n)]
    records = []
    for i, pid in enumerate(ids):
        year = draw(st.integers(min_value=2000, max_value=2020))
        n_refs = draw(st.integers(min_value=0, max_value=min(6, n - 1)))
        pool = [x for x in ids if x != pid]
        refs = draw(st.permutations(pool)) [:n_refs] if pool else []
        records.append((pid, year, refs))
    return make_corpus(records)


@settings(max_examples=60, deadline=None)
@given(random_corpora())
def test_cocitation_matches_brute_force(corpus):
    idx = extract_cocitations(corpus)
    assert dict(idx.items()) == brute_force_cocitations(corpus)


@settings(max_examples=40, deadline=None)
@given(random_corpora(), st.integers(min_value=2000, max_value=2021))
def test_snapshot_monotone(corpus, y):
    g1, g2 = snapshot(corpus, y), snapshot(corpus, y + 3)
    assert set(g1.nodes) <= set(g2.nodes)
    assert set(g1.directed_edges) <= set(g2.directed_edges)


def test_relevant_set_rules():
    corpus = make_corpus([
        ("q", 2017, ["B"]),
        ("A", 2000, []), ("B", 2000, []), ("C", 2000, ["q"]),
        # co-citing witnesses
        ("w1", 2019, ["q", "A"]),
        ("w2", 2019, ["q", "B"]),
        ("w3", 2019, ["q", "C"]),
        ("w4", 2016, ["q", "A"]),
    ])
    idx = extract_cocitations(corpus)
    # A co-cited 2016 and 2019 -> first_year 2016, excluded by the horizon
    assert relevant_set(corpus, idx, "q", 2017) == set()
    # with an earlier horizon A qualifies; B and C stay excluded as direct
    # citations (either direction)
    assert relevant_set(corpus, idx, "q", 2015) == {"A"}


def test_relevant_set_horizon_strict():
    corpus = make_corpus([
        ("q", 2015, []), ("A", 2000, []),
        ("w", 2017, ["q", "A"]),
    ])
    idx = extract_cocitations(corpus)
    assert relevant_set(corpus, idx, "q", 2017) == set()
    assert relevant_set(corpus, idx, "q", 2016) == {"A"}


@settings(max_examples=40, deadline=None)
@given(random_corpora(), st.integers(min_value=2000, max_value=2020))
def test_relevant_set_temporal_safety(corpus, start_year):
    idx = extract_cocitations(corpus)
    for q in list(corpus.papers)[:5]:
        for p in relevant_set(corpus, idx, q, start_year):
            assert idx.first_year(q, p) > start_year


def test_relevant_set_unknown_query(tiny_corpus):
    idx = extract_cocitations(tiny_corpus)
    with pytest.raises(KeyError):
        relevant_set(tiny_corpus, idx, "nope", 2017)


def test_save_load_roundtrip(tmp_path, tiny_corpus):
    from citerec.corpus import save_corpus
    p = tmp_path / "out.jsonl"
    save_corpus(tiny_corpus, str(p))
    again = load_corpus(str(p))
    assert again.papers == tiny_corpus.papers
    assert again.citation_edges == tiny_corpus.citation_edges
