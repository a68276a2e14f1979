"""Corpus ingestion, temporal citation-graph snapshots, and co-citation ground truth.

A corpus file is line-delimited JSON, one paper per line with fields
``id``, ``title``, ``abstract``, ``year``, ``references``. Papers may cite
ids that are absent from the corpus; such dangling references are kept on
the paper record but never become graph edges (they are counted instead).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

log = logging.getLogger("citerec.corpus")

DEFAULT_YEAR_RANGE = (1850, 2100)

REQUIRED_FIELDS = ("id", "title", "abstract", "year", "references")


class CorpusError(ValueError):
    """Raised for unreadable, malformed, or inconsistent corpus data."""


@dataclass(frozen=True)
class Paper:
    id: str
    title: str
    abstract: str
    year: int
    references: tuple[str, ...]


@dataclass
class CorpusStats:
    """Counters accumulated while building a corpus; informational only."""

    dangling_references: int = 0
    self_citations_dropped: int = 0
    duplicate_references_dropped: int = 0
    year_anomaly_edges: int = 0


@dataclass
class Corpus:
    papers: dict[str, Paper]
    citation_edges: list[tuple[str, str]]
    stats: CorpusStats = field(default_factory=CorpusStats)

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self.papers

    def __len__(self) -> int:
        return len(self.papers)

    def year_range(self) -> tuple[int, int]:
        years = [p.year for p in self.papers.values()]
        return (min(years), max(years)) if years else (0, 0)

    @classmethod
    def from_papers(cls, papers: list[Paper]) -> "Corpus":
        """Index papers, derive resolvable citation edges, count anomalies.

        Duplicate ids raise; self-citations and duplicate references are
        dropped from each paper's reference list with counters. Edges where
        the citing paper predates the cited one are kept (real corpora
        contain such records) but counted.
        """
        stats = CorpusStats()
        indexed: dict[str, Paper] = {}
        cleaned: list[Paper] = []
        for p in papers:
            if p.id in indexed:
                raise CorpusError(f"duplicate paper id {p.id!r}")
            refs: list[str] = []
            seen: set[str] = set()
            for r in p.references:
                if r == p.id:
                    stats.self_citations_dropped += 1
                    continue
                if r in seen:
                    stats.duplicate_references_dropped += 1
                    continue
                seen.add(r)
                refs.append(r)
            q = Paper(p.id, p.title, p.abstract, p.year, tuple(refs))
            indexed[q.id] = q
            cleaned.append(q)

        edges: list[tuple[str, str]] = []
        for p in cleaned:
            for r in p.references:
                cited = indexed.get(r)
                if cited is None:
                    stats.dangling_references += 1
                    continue
                if p.year < cited.year:
                    stats.year_anomaly_edges += 1
                edges.append((p.id, r))
        if stats.dangling_references:
            log.warning("%d dangling references excluded from graph edges",
                        stats.dangling_references)
        if stats.year_anomaly_edges:
            log.warning("%d citation edges point forward in time",
                        stats.year_anomaly_edges)
        return cls(indexed, edges, stats)


def _parse_record(line: str, lineno: int, year_range: tuple[int, int]) -> Paper:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as e:
        raise CorpusError(f"line {lineno}: malformed record ({e.msg})") from e
    if not isinstance(rec, dict):
        raise CorpusError(f"line {lineno}: record is not an object")
    for name in REQUIRED_FIELDS:
        if name not in rec:
            raise CorpusError(f"line {lineno}: missing required field {name!r}")
    pid = rec["id"]
    if not isinstance(pid, str) or not pid:
        raise CorpusError(f"line {lineno}: id must be a non-empty string")
    year = rec["year"]
    if not isinstance(year, int) or isinstance(year, bool):
        raise CorpusError(f"line {lineno}: year must be an integer")
    lo, hi = year_range
    if not lo <= year <= hi:
        raise CorpusError(
            f"line {lineno}: year {year} outside plausible range [{lo}, {hi}]")
    refs = rec["references"]
    if not isinstance(refs, list) or not all(isinstance(r, str) for r in refs):
        raise CorpusError(f"line {lineno}: references must be a list of strings")
    title = rec["title"] if isinstance(rec["title"], str) else None
    abstract = rec["abstract"] if isinstance(rec["abstract"], str) else None
    if title is None or abstract is None:
        raise CorpusError(f"line {lineno}: title and abstract must be strings")
    return Paper(pid, title, abstract, year, tuple(refs))


def load_corpus(path: str, year_range: tuple[int, int] = DEFAULT_YEAR_RANGE) -> Corpus:
    """Load a line-delimited corpus file, rejecting bad records with line context."""
    papers: list[Paper] = []
    seen_lines: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            p = _parse_record(line, lineno, year_range)
            if p.id in seen_lines:
                raise CorpusError(
                    f"line {lineno}: duplicate id {p.id!r} "
                    f"(first seen at line {seen_lines[p.id]})")
            seen_lines[p.id] = lineno
            papers.append(p)
    return Corpus.from_papers(papers)


def save_corpus(corpus: Corpus, path: str) -> None:
    """Write the corpus back out in the line-delimited record format."""
    with open(path, "w", encoding="utf-8") as fh:
        for p in corpus.papers.values():
            rec = {"id": p.id, "title": p.title, "abstract": p.abstract,
                   "year": p.year, "references": list(p.references)}
            fh.write(json.dumps(rec, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


class GraphSnapshot:
    """The citation graph restricted to papers published in or before ``year``.

    Nodes and adjacency views are fixed at construction; instances are
    treated as immutable and are safe to share across workers.
    """

    def __init__(self, year: int, nodes: list[str],
                 directed_edges: list[tuple[str, str]]):
        self.year = year
        self.nodes: tuple[str, ...] = tuple(sorted(nodes))
        self.node_set: frozenset[str] = frozenset(self.nodes)
        for u, v in directed_edges:
            if u not in self.node_set or v not in self.node_set:
                raise ValueError(f"edge ({u!r}, {v!r}) has endpoint outside node set")
        self.directed_edges: tuple[tuple[str, str], ...] = tuple(directed_edges)
        out_adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        in_adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        for u, v in directed_edges:
            out_adj[u].add(v)
            in_adj[v].add(u)
        self._out = {n: tuple(sorted(s)) for n, s in out_adj.items()}
        self._in = {n: tuple(sorted(s)) for n, s in in_adj.items()}
        self._und = {n: tuple(sorted(out_adj[n] | in_adj[n])) for n in self.nodes}
        self._und_sets = {n: frozenset(t) for n, t in self._und.items()}

    def __len__(self) -> int:
        return len(self.nodes)

    def has_node(self, v: str) -> bool:
        return v in self.node_set

    def out_neighbors(self, v: str) -> tuple[str, ...]:
        return self._out[v]

    def in_neighbors(self, v: str) -> tuple[str, ...]:
        return self._in[v]

    def und_neighbors(self, v: str) -> tuple[str, ...]:
        return self._und[v]

    def und_set(self, v: str) -> frozenset[str]:
        return self._und_sets[v]

    def degree(self, v: str) -> int:
        return len(self._und[v])


def snapshot(corpus: Corpus, year: int) -> GraphSnapshot:
    """Papers with publication year <= ``year`` and the citations among them."""
    nodes = [pid for pid, p in corpus.papers.items() if p.year <= year]
    keep = set(nodes)
    edges = [(u, v) for u, v in corpus.citation_edges if u in keep and v in keep]
    return GraphSnapshot(year, nodes, edges)


@dataclass(frozen=True)
class CoCitation:
    """An unordered paper pair cited together by at least one third paper."""

    pair: tuple[str, str]  # lexicographically sorted
    first_year: int        # earliest publication year among citing papers


class CoCitationIndex:
    """Symmetric lookup from unordered paper pairs to earliest co-citing year."""

    def __init__(self, first_year: dict[tuple[str, str], int]):
        self._first_year = first_year
        self._partners: dict[str, set[str]] = {}
        for a, b in first_year:
            self._partners.setdefault(a, set()).add(b)
            self._partners.setdefault(b, set()).add(a)

    @staticmethod
    def _key(a: str, b: str) -> tuple[str, str]:
        return (a, b) if a <= b else (b, a)

    def __len__(self) -> int:
        return len(self._first_year)

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return self._key(*pair) in self._first_year

    def first_year(self, a: str, b: str) -> int | None:
        return self._first_year.get(self._key(a, b))

    def partners(self, paper_id: str) -> frozenset[str]:
        """All papers ever co-cited with ``paper_id``, regardless of year."""
        return frozenset(self._partners.get(paper_id, ()))

    def records(self) -> list[CoCitation]:
        return [CoCitation(pair, y)
                for pair, y in sorted(self._first_year.items())]

    def items(self):
        return self._first_year.items()


def extract_cocitations(corpus: Corpus) -> CoCitationIndex:
    """Every unordered pair cited together by some paper, with the earliest such year.

    Pairs are restricted to ids present in the corpus; a paper citing n
    resolvable ids contributes all n*(n-1)/2 pairs.
    """
    first_year: dict[tuple[str, str], int] = {}
    for p in corpus.papers.values():
        refs = sorted(r for r in p.references if r in corpus.papers)
        for i in range(len(refs)):
            for j in range(i + 1, len(refs)):
                key = (refs[i], refs[j])
                prev = first_year.get(key)
                if prev is None or p.year < prev:
                    first_year[key] = p.year
    return CoCitationIndex(first_year)


def relevant_set(corpus: Corpus, cocites: CoCitationIndex, query: str,
                 start_year: int) -> set[str]:
    """Papers first co-cited with ``query`` strictly after ``start_year``.

    Direct citations are excluded in both directions: papers the query cites
    and papers citing the query are never relevant, however often they are
    co-cited with it.
    """
    if query not in corpus.papers:
        raise KeyError(f"unknown query id {query!r}")
    out = {p for p in cocites.partners(query)
           if cocites.first_year(query, p) > start_year}
    out -= set(corpus.papers[query].references)
    out = {p for p in out
           if p not in corpus.papers or query not in corpus.papers[p].references}
    return out


# Re-exported here because embedding files are part of this module's
# ingestion surface; the implementation lives with the matrix type.
from .matrix import load_embedding_matrix  # noqa: E402,F401
