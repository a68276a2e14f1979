import json

import pytest

from citerec.corpus import Corpus, Paper


def make_corpus(records) -> Corpus:
    """records: iterable of (id, year, references) or (id, year, refs, title, abstract)."""
    papers = []
    for rec in records:
        pid, year, refs = rec[0], rec[1], rec[2]
        title = rec[3] if len(rec) > 3 else f"title {pid}"
        abstract = rec[4] if len(rec) > 4 else ""
        papers.append(Paper(pid, title, abstract, year, tuple(refs)))
    return Corpus.from_papers(papers)


def write_corpus_file(tmp_path, records, name="corpus.jsonl"):
    path = tmp_path / name
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return str(path)


@pytest.fixture
def tiny_corpus():
    # A(2015) cites B(2010); C(2018) cites A and B
    return make_corpus([
        ("A", 2015, ["B"]),
        ("B", 2010, []),
        ("C", 2018, ["A", "B"]),
    ])
