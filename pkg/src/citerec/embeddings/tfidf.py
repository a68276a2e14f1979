"""Sparse TF-IDF rows over title+abstract text.

tf is the raw in-document count; idf = ln((1+N)/(1+df)) + 1 over the
documents of the graph the model was fitted on. The vocabulary keeps the
``vocab_cap`` highest-df terms (ties broken by term). Rows are
L2-normalized; a document with no in-vocabulary tokens gets a single
synthetic feature at the reserved last index so no row is ever zero.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

from ..corpus import Corpus, GraphSnapshot
from ..matrix import EmbeddingMatrix

_TOKEN = re.compile(r"[a-z0-9]+")

STOPWORDS = frozenset("""
a an and are as at be but by for from has have if in into is it its no not
of on or such that the their then there these they this to was were will
with
""".split())


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric runs, minus stopwords and single characters."""
    return [t for t in _TOKEN.findall(text.lower())
            if len(t) >= 2 and t not in STOPWORDS]


def _document(corpus: Corpus, pid: str) -> str:
    p = corpus.papers[pid]
    return p.title + " " + p.abstract


@dataclass
class TfidfModel:
    vocab: dict[str, int]      # term -> column
    idf: list[float]           # aligned with vocab columns
    dim: int                   # len(vocab) + 1; last column is the empty-doc flag

    def transform(self, corpus: Corpus, ids: list[str],
                  method: str = "tfidf") -> EmbeddingMatrix:
        rows: list[dict[int, float]] = []
        for pid in ids:
            counts = Counter(tokenize(_document(corpus, pid)))
            row = {self.vocab[t]: c * self.idf[self.vocab[t]]
                   for t, c in counts.items() if t in self.vocab}
            if not row:
                row = {self.dim - 1: 1.0}
            norm = math.sqrt(sum(v * v for v in row.values()))
            rows.append({j: v / norm for j, v in sorted(row.items())})
        return EmbeddingMatrix(method, self.dim, list(ids), sparse_rows=rows)


def fit_tfidf(corpus: Corpus, g: GraphSnapshot, vocab_cap: int) -> TfidfModel:
    for pid in g.nodes:
        if pid not in corpus.papers:
            raise KeyError(f"node {pid!r} has no paper record")
    df: Counter[str] = Counter()
    for pid in g.nodes:
        df.update(set(tokenize(_document(corpus, pid))))
    terms = sorted(df, key=lambda t: (-df[t], t))[:vocab_cap]
    vocab = {t: i for i, t in enumerate(sorted(terms))}
    n_docs = len(g.nodes)
    idf = [0.0] * len(vocab)
    for t, i in vocab.items():
        idf[i] = math.log((1.0 + n_docs) / (1.0 + df[t])) + 1.0
    return TfidfModel(vocab, idf, len(vocab) + 1)


def tfidf_embed(corpus: Corpus, g: GraphSnapshot, vocab_cap: int) -> EmbeddingMatrix:
    """Fit on the snapshot's documents and embed exactly those documents."""
    model = fit_tfidf(corpus, g, vocab_cap)
    return model.transform(corpus, list(g.nodes))
