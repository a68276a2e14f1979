"""Evaluation mathematics for ranked recommendations.

Relevance: precision/recall at k, pairwise ranking AUC, binary nDCG, and
reciprocal ranks. Beyond-relevance: novelty (mean cosine distance from the
query) and diversity (mean pairwise cosine distance among recommendations,
the average intra-list distance), each computable against any reference
embedding space, plus hop distances on the citation graph for context.

A metric that is undefined for a query (empty relevant set, singleton
subset, disconnected pair) is reported as absent (None) and excluded from
aggregates; substituting zero would bias method comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import GraphSnapshot
from .graphcore import bfs_distances
from .matrix import EmbeddingMatrix


def precision_recall_at_k(ranking: list[str], relevant: set[str],
                          k: int) -> tuple[float, float | None]:
    """Precision keeps k in the denominator even for short rankings; recall
    is absent when there are no relevant items."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(set(ranking)) != len(ranking):
        raise ValueError("ranking contains duplicates")
    hits = sum(1 for c in ranking[:k] if c in relevant)
    precision = hits / k
    recall = hits / len(relevant) if relevant else None
    return precision, recall


def auc(ranking: list[str], relevant: set[str]) -> float | None:
    """Probability that a random relevant item outranks a random irrelevant
    one: (1/(|R|(n-|R|))) * sum over pairs of [relevant above irrelevant].

    Computed by a single scan over the ranking (exact integer pair counts);
    absent when the ranking is all-relevant or all-irrelevant.
    """
    n = len(ranking)
    n_rel = sum(1 for c in ranking if c in relevant)
    if n_rel == 0 or n_rel == n:
        return None
    won = 0
    seen_rel = 0
    for c in ranking:
        if c in relevant:
            seen_rel += 1
        else:
            won += seen_rel
    return won / (n_rel * (n - n_rel))


def auc_bruteforce(ranking: list[str], relevant: set[str]) -> float | None:
    """Literal double loop over (relevant, irrelevant) pairs; test oracle."""
    pos = {c: i for i, c in enumerate(ranking)}
    rel = [c for c in ranking if c in relevant]
    irr = [c for c in ranking if c not in relevant]
    if not rel or not irr:
        return None
    won = sum(1 for r in rel for s in irr if pos[r] < pos[s])
    return won / (len(rel) * len(irr))


def ndcg_at_k(ranking: list[str], relevant: set[str], k: int) -> float | None:
    """Binary-relevance DCG over the top k, divided by the ideal DCG."""
    if not relevant:
        return None
    dcg = sum(1.0 / math.log2(i + 2)
              for i, c in enumerate(ranking[:k]) if c in relevant)
    ideal = sum(1.0 / math.log2(i + 2) for i in range(min(k, len(relevant))))
    return dcg / ideal


def first_relevant_rank(ranking: list[str], relevant: set[str]) -> int | None:
    for i, c in enumerate(ranking, start=1):
        if c in relevant:
            return i
    return None


def reciprocal_rank(ranking: list[str], relevant: set[str]) -> float | None:
    rank = first_relevant_rank(ranking, relevant)
    return None if rank is None else 1.0 / rank


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine distance undefined for zero vectors")
    return float(np.dot(a, b) / (na * nb))


def novelty(ref: EmbeddingMatrix, query: str, recs: list[str]) -> float:
    """Mean cosine distance between the query vector and each recommendation."""
    if not recs:
        raise ValueError("novelty needs at least one recommendation")
    q = ref.vector(query)
    return float(np.mean([1.0 - _cosine(q, ref.vector(r)) for r in recs]))


def diversity(ref: EmbeddingMatrix, recs: list[str]) -> float | None:
    """Mean cosine distance over the k(k-1)/2 unordered recommendation pairs."""
    if len(recs) < 2:
        return None
    vecs = [ref.vector(r) for r in recs]
    dists = [1.0 - _cosine(vecs[i], vecs[j])
             for i in range(len(vecs)) for j in range(i + 1, len(vecs))]
    return float(np.mean(dists))


def subset_metrics(ref: EmbeddingMatrix, query: str, ranking: list[str],
                   relevant: set[str], k: int):
    """Novelty/diversity of the relevant recommendations in the top k.

    Returns (novelty, diversity); both absent for an empty intersection and
    diversity absent for a singleton.
    """
    subset = [c for c in ranking[:k] if c in relevant]
    if not subset:
        return None, None
    return novelty(ref, query, subset), diversity(ref, subset)


def mean_hop_distance(g: GraphSnapshot, query: str,
                      recs: list[str]) -> tuple[float | None, int]:
    """Mean shortest-path hops from the query to each reachable
    recommendation; returns (mean, unreachable_count)."""
    if not recs:
        return None, 0
    dist = bfs_distances(g, query, targets=set(recs))
    hops = [dist[r] for r in recs if r in dist]
    unreachable = len(recs) - len(hops)
    if not hops:
        return None, unreachable
    return float(np.mean(hops)), unreachable


def bootstrap(values, resamples: int = 1000, seed: int = 0) -> tuple[float, float]:
    """(mean of the values, std of ``resamples`` resampled means)."""
    vals = np.asarray(list(values), dtype=float)
    if vals.size == 0:
        raise ValueError("bootstrap needs at least one value")
    if resamples < 100:
        raise ValueError("use at least 100 bootstrap resamples")
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = rng.integers(0, vals.size, size=(resamples, vals.size))
    means = vals[idx].mean(axis=1)
    return float(vals.mean()), float(means.std(ddof=1))


def bootstrap_statistic(values, stat, resamples: int = 1000,
                        seed: int = 0) -> tuple[float, float]:
    """Bootstrap dispersion of an arbitrary statistic of the sample."""
    vals = np.asarray(list(values), dtype=float)
    if vals.size == 0:
        raise ValueError("bootstrap needs at least one value")
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = rng.integers(0, vals.size, size=(resamples, vals.size))
    stats = np.array([stat(vals[row]) for row in idx])
    return float(stat(vals)), float(stats.std(ddof=1))


def cohens_d(a, b) -> float | None:
    """Standardized mean difference with the pooled sample deviation;
    absent when the pooled deviation vanishes."""
    xa = np.asarray(list(a), dtype=float)
    xb = np.asarray(list(b), dtype=float)
    if xa.size < 2 or xb.size < 2:
        raise ValueError("cohens_d needs at least two values per sample")
    va = xa.var(ddof=1)
    vb = xb.var(ddof=1)
    pooled = math.sqrt(((xa.size - 1) * va + (xb.size - 1) * vb)
                       / (xa.size + xb.size - 2))
    if pooled == 0.0:
        if xa.mean() == xb.mean():
            return 0.0
        return None
    return float((xa.mean() - xb.mean()) / pooled)


# --- per-query evaluation and aggregation -----------------------------------

@dataclass
class QueryEval:
    query: str
    relevant: set[str]
    metrics: dict[str, float | None]


@dataclass
class MetricAggregate:
    mean: float | None
    bootstrap_std: float | None
    n_queries: int
    n_absent: int


@dataclass
class MethodReport:
    method: str
    per_query: list[QueryEval]
    aggregates: dict[str, MetricAggregate]


@dataclass
class EvalReport:
    methods: list[MethodReport]
    comparisons: dict[tuple[str, str], dict[str, float | None]]
    seed: int
    bootstrap_resamples: int
    k_values: tuple[int, ...] = ()


def metric_columns(ks, include_content: bool) -> list[str]:
    cols = []
    for k in ks:
        cols.append(f"precision@{k}")
    for k in ks:
        cols.append(f"recall@{k}")
    for k in ks:
        cols.append(f"ndcg@{k}")
    cols += ["auc", "rr", "first_rel_rank"]
    for k in ks:
        cols += [f"novelty_graph@{k}", f"diversity_graph@{k}",
                 f"rel_novelty_graph@{k}", f"rel_diversity_graph@{k}"]
    for k in ks:
        cols += [f"hop@{k}", f"rel_hop@{k}"]
    if include_content:
        for k in ks:
            cols += [f"novelty_content@{k}", f"diversity_content@{k}",
                     f"rel_novelty_content@{k}", f"rel_diversity_content@{k}"]
    return cols


def evaluate_query(query: str, ranking: list[str], relevant: set[str],
                   ks, graph_ref: EmbeddingMatrix | None,
                   content_ref: EmbeddingMatrix | None,
                   g: GraphSnapshot | None) -> QueryEval:
    """All per-query metrics; reference-space metrics are skipped when the
    corresponding reference matrix is not supplied."""
    m: dict[str, float | None] = {}
    for k in ks:
        p, r = precision_recall_at_k(ranking, relevant, k)
        m[f"precision@{k}"] = p
        m[f"recall@{k}"] = r
    for k in ks:
        m[f"ndcg@{k}"] = ndcg_at_k(ranking, relevant, k)
    m["auc"] = auc(ranking, relevant)
    m["rr"] = reciprocal_rank(ranking, relevant)
    rank = first_relevant_rank(ranking, relevant)
    m["first_rel_rank"] = float(rank) if rank is not None else None
    for label, ref in (("graph", graph_ref), ("content", content_ref)):
        if ref is None:
            continue
        for k in ks:
            top = ranking[:k]
            m[f"novelty_{label}@{k}"] = novelty(ref, query, top) if top else None
            m[f"diversity_{label}@{k}"] = diversity(ref, top)
            sub_nov, sub_div = subset_metrics(ref, query, ranking, relevant, k)
            m[f"rel_novelty_{label}@{k}"] = sub_nov
            m[f"rel_diversity_{label}@{k}"] = sub_div
    if g is not None:
        max_k = max(ks)
        dist = bfs_distances(g, query, targets=set(ranking[:max_k]))
        for k in ks:
            top = ranking[:k]
            hops = [dist[c] for c in top if c in dist]
            m[f"hop@{k}"] = float(np.mean(hops)) if hops else None
            sub = [dist[c] for c in top if c in relevant and c in dist]
            m[f"rel_hop@{k}"] = float(np.mean(sub)) if sub else None
    return QueryEval(query, set(relevant), m)


REPORT_RENAMES = {"rr": "mrr"}

_INV_MEAN = "first_rel_rank"  # aggregated as 1/mean -> mrr_alt


def aggregate_method(method: str, evals: list[QueryEval], columns: list[str],
                     resamples: int, seed: int) -> MethodReport:
    """Bootstrap aggregates per metric. ``rr`` aggregates to ``mrr``;
    ``first_rel_rank`` aggregates to ``mrr_alt`` = 1 / mean(first ranks),
    the alternative reading of a reciprocal of an average rank."""
    aggs: dict[str, MetricAggregate] = {}
    n = len(evals)
    for col in columns:
        values = [qe.metrics.get(col) for qe in evals]
        defined = [v for v in values if v is not None]
        absent = n - len(defined)
        name = REPORT_RENAMES.get(col, col)
        if col == _INV_MEAN:
            name = "mrr_alt"
        if not defined:
            aggs[name] = MetricAggregate(None, None, 0, absent)
            continue
        if col == _INV_MEAN:
            mean, std = bootstrap_statistic(
                defined, lambda v: 1.0 / np.mean(v), resamples, seed)
        else:
            mean, std = bootstrap(defined, resamples, seed)
        aggs[name] = MetricAggregate(mean, std, len(defined), absent)
    return MethodReport(method, evals, aggs)


def compare_methods(reports: list[MethodReport],
                    columns: list[str]) -> dict[tuple[str, str], dict[str, float | None]]:
    """Cohen's d per metric for every ordered method pair (first minus second)."""
    out: dict[tuple[str, str], dict[str, float | None]] = {}
    for i in range(len(reports)):
        for j in range(i + 1, len(reports)):
            a, b = reports[i], reports[j]
            per_metric: dict[str, float | None] = {}
            for col in columns:
                if col == _INV_MEAN:
                    continue
                va = [qe.metrics.get(col) for qe in a.per_query]
                vb = [qe.metrics.get(col) for qe in b.per_query]
                va = [v for v in va if v is not None]
                vb = [v for v in vb if v is not None]
                name = REPORT_RENAMES.get(col, col)
                if len(va) < 2 or len(vb) < 2:
                    per_metric[name] = None
                else:
                    per_metric[name] = cohens_d(va, vb)
            out[(a.method, b.method)] = per_metric
    return out


# --- report file -------------------------------------------------------------

REPORT_MAGIC = "citerec-report v1"


def _fmt(v: float | None) -> str:
    return "absent" if v is None else repr(v)


def render_report(report: EvalReport) -> str:
    """Deterministic text rendering; identical inputs give identical bytes."""
    lines = [REPORT_MAGIC,
             f"seed {report.seed}",
             f"bootstrap_resamples {report.bootstrap_resamples}",
             "k_values " + ",".join(str(k) for k in report.k_values),
             "methods " + ",".join(m.method for m in report.methods),
             ""]
    for m in report.methods:
        lines.append(f"[method {m.method}]")
        lines.append(f"queries {len(m.per_query)}")
        for name, agg in m.aggregates.items():
            lines.append(f"metric {name} mean {_fmt(agg.mean)} "
                         f"std {_fmt(agg.bootstrap_std)} "
                         f"n {agg.n_queries} absent {agg.n_absent}")
        lines.append("[end]")
        lines.append("")
    for (a, b), metrics in report.comparisons.items():
        lines.append(f"[comparison {a} vs {b}]")
        for name, d in metrics.items():
            lines.append(f"metric {name} cohens_d {_fmt(d)}")
        lines.append("[end]")
        lines.append("")
    return "\n".join(lines)


def write_report(report: EvalReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_report(report))


# --- per-query metric files ----------------------------------------------------

def write_per_query(evals: list[QueryEval], columns: list[str],
                    path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("query_id\t" + "\t".join(columns) + "\n")
        for qe in evals:
            cells = [qe.query]
            for col in columns:
                v = qe.metrics.get(col)
                cells.append("NA" if v is None else repr(v))
            fh.write("\t".join(cells) + "\n")


def read_per_query(path: str) -> list[QueryEval]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if not header or header[0] != "query_id":
            raise ValueError("bad per-query file header")
        columns = header[1:]
        evals = []
        for line in fh:
            if not line.strip():
                continue
            cells = line.rstrip("\n").split("\t")
            metrics = {col: (None if cell == "NA" else float(cell))
                       for col, cell in zip(columns, cells[1:])}
            evals.append(QueryEval(cells[0], set(), metrics))
    return evals
