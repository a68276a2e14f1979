"""Pairwise recommendation: an MLP scores the concatenated embeddings of a
query and a candidate as the probability that the two will be co-cited.

Positives are both orientations of every co-citation whose first co-citing
year is within the training cutoff; negatives are drawn uniformly from the
candidate pool, never hitting a known co-cited partner of the query.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .corpus import CoCitationIndex, Corpus
from .matrix import EmbeddingMatrix
from . import nncore

log = logging.getLogger("citerec.recommender")


@dataclass(frozen=True)
class LabeledPair:
    query: str
    candidate: str
    label: int
    weight: float = 1.0


def build_training_pairs(cocites: CoCitationIndex, corpus: Corpus,
                         cutoff_year: int, candidate_pool: set[str],
                         negatives_per_positive: int = 5,
                         seed: int = 0) -> list[LabeledPair]:
    """Labeled pairs for scorer training, deterministic given the seed.

    Raises when no co-citation falls inside the cutoff and pool: an empty
    positive set means the temporal split is misconfigured.
    """
    if negatives_per_positive < 1:
        raise ValueError("need at least one negative per positive")
    if not candidate_pool:
        raise ValueError("empty candidate pool")
    positives: list[tuple[str, str]] = []
    for (a, b), year in sorted(cocites.items()):
        if year <= cutoff_year and a in candidate_pool and b in candidate_pool:
            positives.append((a, b))
            positives.append((b, a))
    if not positives:
        raise ValueError(f"no co-citations at or before {cutoff_year} within "
                         "the candidate pool; check the temporal split")

    pool = sorted(candidate_pool)
    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = [LabeledPair(q, c, 1) for q, c in positives]
    excluded: dict[str, frozenset[str]] = {}
    for q, _ in positives:
        if q not in excluded:
            excluded[q] = cocites.partners(q) | {q}
        banned = excluded[q]
        if len(banned) >= len(pool):
            raise ValueError(f"no admissible negatives for query {q!r}")
        drawn = 0
        while drawn < negatives_per_positive:
            cand = pool[int(rng.integers(0, len(pool)))]
            if cand in banned:
                continue
            pairs.append(LabeledPair(q, cand, 0))
            drawn += 1
    return pairs


@dataclass
class ScorerModel:
    params: nncore.DenseParams
    method: str
    embedding_dim: int
    final_loss: float | None = None

    @property
    def input_dim(self) -> int:
        return self.params.input_dim


SCORER_MAGIC = "scorer v1"


def save_scorer(model: ScorerModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SCORER_MAGIC + "\n")
        fh.write(f"method {model.method}\n")
        fh.write(f"embedding_dim {model.embedding_dim}\n")
        nncore.write_dense_checkpoint(model.params, fh)


def load_scorer(path: str) -> ScorerModel:
    with open(path, encoding="utf-8") as fh:
        if fh.readline().strip() != SCORER_MAGIC:
            raise ValueError("bad scorer checkpoint header")
        method = fh.readline().split()[1]
        embedding_dim = int(fh.readline().split()[1])
        params = nncore.read_dense_checkpoint(fh)
    return ScorerModel(params, method, embedding_dim)


def score_pair(model: ScorerModel, h_query: np.ndarray,
               h_candidate: np.ndarray) -> float:
    """sigma(W2 . sigma(W1 . concat(h_q, h_i) + b1) + b2), in (0, 1)."""
    x = np.concatenate([np.asarray(h_query, float),
                        np.asarray(h_candidate, float)])
    out = nncore.forward(model.params, x)
    return float(out[0])


def score_batch(model: ScorerModel, h_query: np.ndarray,
                candidates_matrix: np.ndarray) -> np.ndarray:
    """Scores of one query against a stack of candidate vectors."""
    n = candidates_matrix.shape[0]
    X = np.concatenate([np.tile(h_query, (n, 1)), candidates_matrix], axis=1)
    return nncore.forward(model.params, X)[:, 0]


@dataclass(frozen=True)
class ScorerTrainConfig:
    hidden: int = 64
    hidden_activation: str = "sigmoid"
    epochs: int = 5
    batch_size: int = 512
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    seed: int = 0


def init_scorer(embedding_dim: int, cfg: ScorerTrainConfig,
                method: str) -> ScorerModel:
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    params = nncore.init_dense([2 * embedding_dim, cfg.hidden, 1],
                               [cfg.hidden_activation, "sigmoid"], rng)
    return ScorerModel(params, method, embedding_dim)


def train_scorer(emb: EmbeddingMatrix, pairs: list[LabeledPair],
                 cfg: ScorerTrainConfig) -> ScorerModel:
    """Minimize mean BCE of score_pair against the pair labels."""
    if not pairs:
        raise ValueError("no training pairs")
    missing = sorted({pid for p in pairs for pid in (p.query, p.candidate)
                      if pid not in emb})
    if missing:
        raise KeyError(f"{len(missing)} pair ids lack embeddings "
                       f"(e.g. {missing[0]!r})")
    model = init_scorer(emb.dim, cfg, emb.method)
    rng = np.random.Generator(np.random.PCG64(cfg.seed + 1))
    ids = sorted({pid for p in pairs for pid in (p.query, p.candidate)})
    rows = {pid: i for i, pid in enumerate(ids)}
    vectors = emb.take(ids)
    qi = np.array([rows[p.query] for p in pairs])
    ci = np.array([rows[p.candidate] for p in pairs])
    t = np.array([float(p.label) for p in pairs])
    w = np.array([p.weight for p in pairs])
    opt = nncore.init_optimizer(model.params.arrays(), cfg.optimizer,
                                cfg.learning_rate)
    last = None
    for _ in range(cfg.epochs):
        order = rng.permutation(len(pairs))
        for lo in range(0, len(pairs), cfg.batch_size):
            sel = order[lo:lo + cfg.batch_size]
            X = np.concatenate([vectors[qi[sel]], vectors[ci[sel]]], axis=1)
            grads, loss = nncore.grad(model.params, (X, t[sel], w[sel]))
            if not np.isfinite(loss):
                raise FloatingPointError("non-finite scorer loss")
            nncore.step(model.params, grads, opt)
            last = loss
    model.final_loss = last
    return model


@dataclass
class RecommendationList:
    """Full descending ranking for one query; ``top`` is the k-prefix."""

    query: str
    k: int
    ranking: list[tuple[str, float]]

    def __post_init__(self):
        scores = [s for _, s in self.ranking]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValueError("ranking scores must be non-increasing")
        ids = [c for c, _ in self.ranking]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate candidates in ranking")
        if self.query in set(ids):
            raise ValueError("query may not appear in its own ranking")

    @property
    def top(self) -> list[tuple[str, float]]:
        return self.ranking[:self.k]

    def ranked_ids(self) -> list[str]:
        return [c for c, _ in self.ranking]


def recommend_topk(model: ScorerModel, emb: EmbeddingMatrix, query: str,
                   candidates: set[str], k: int) -> RecommendationList:
    """Score every candidate except the query; ties break by ascending id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if query not in emb:
        raise KeyError(f"query {query!r} has no embedding")
    cand = sorted(c for c in candidates if c != query)
    if not cand:
        raise ValueError("no candidates to rank")
    missing = emb.missing(cand)
    if missing:
        raise KeyError(f"{len(missing)} candidates lack embeddings: "
                       f"{missing[:5]}{'...' if len(missing) > 5 else ''}")
    scores = score_batch(model, emb.vector(query), emb.take(cand))
    order = sorted(range(len(cand)), key=lambda i: (-scores[i], cand[i]))
    ranking = [(cand[i], float(scores[i])) for i in order]
    return RecommendationList(query, min(k, len(cand)), ranking)


def save_recommendations(recs: list[RecommendationList], path: str,
                         full: bool = True) -> None:
    """Line format: query, 1-based rank, candidate, score."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in recs:
            rows = rec.ranking if full else rec.top
            for rank, (cand, score) in enumerate(rows, start=1):
                fh.write(f"{rec.query}\t{rank}\t{cand}\t{repr(score)}\n")


def load_recommendations(path: str) -> list[RecommendationList]:
    by_query: dict[str, list[tuple[str, float]]] = {}
    order: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            q, _rank, cand, score = line.rstrip("\n").split("\t")
            if q not in by_query:
                by_query[q] = []
                order.append(q)
            by_query[q].append((cand, float(score)))
    return [RecommendationList(q, len(by_query[q]), by_query[q]) for q in order]
