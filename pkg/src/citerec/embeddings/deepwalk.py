"""DeepWalk-style node embeddings: uniform random walks on the undirected
citation view, trained with skip-gram and negative sampling (noise
distribution proportional to degree^0.75).

The trainer is plain numpy, deterministic given the config seed. Nodes
with zero degree take part in no walks; they keep their initialized vector
(normalized) and are counted on the returned model.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from ..corpus import GraphSnapshot
from ..matrix import EmbeddingMatrix
from ..nncore import sigmoid

log = logging.getLogger("citerec.deepwalk")


@dataclass(frozen=True)
class DeepWalkConfig:
    walks_per_node: int = 10
    walk_length: int = 40
    window: int = 5
    dim: int = 128
    negative_samples: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    seed: int = 0
    batch_size: int = 1024

    def __post_init__(self):
        for name in ("walks_per_node", "walk_length", "window", "dim",
                     "negative_samples", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


def _csr(g: GraphSnapshot):
    nodes = list(g.nodes)
    index = {v: i for i, v in enumerate(nodes)}
    degs = np.array([g.degree(v) for v in nodes], dtype=np.int64)
    offsets = np.zeros(len(nodes) + 1, dtype=np.int64)
    np.cumsum(degs, out=offsets[1:])
    flat = np.empty(offsets[-1], dtype=np.int64)
    for i, v in enumerate(nodes):
        flat[offsets[i]:offsets[i + 1]] = [index[u] for u in g.und_neighbors(v)]
    return nodes, index, degs, offsets, flat


def _walk_matrix(degs, offsets, flat, walks_per_node, walk_length, rng):
    """(rows, walk_length) matrix of node indices; isolated nodes excluded."""
    noniso = np.flatnonzero(degs > 0)
    rounds = [rng.permutation(noniso) for _ in range(walks_per_node)]
    starts = np.concatenate(rounds) if rounds else np.empty(0, dtype=np.int64)
    walks = np.empty((len(starts), walk_length), dtype=np.int64)
    if len(starts) == 0:
        return walks
    walks[:, 0] = starts
    for t in range(1, walk_length):
        cur = walks[:, t - 1]
        choice = rng.integers(0, degs[cur])
        walks[:, t] = flat[offsets[cur] + choice]
    return walks


def random_walks(g: GraphSnapshot, walks_per_node: int, walk_length: int,
                 seed: int) -> list[list[str]]:
    """Raw walk output as id sequences; isolated nodes get a length-1 walk."""
    nodes, _, degs, offsets, flat = _csr(g)
    rng = np.random.Generator(np.random.PCG64(seed))
    walks = _walk_matrix(degs, offsets, flat, walks_per_node, walk_length, rng)
    out = [[nodes[i] for i in row] for row in walks]
    for i in np.flatnonzero(degs == 0):
        out.append([nodes[i]])
    return out


def _skipgram_pairs(walks: np.ndarray, window: int):
    centers, contexts = [], []
    length = walks.shape[1]
    for delta in range(1, window + 1):
        if delta >= length:
            break
        left = walks[:, :-delta].reshape(-1)
        right = walks[:, delta:].reshape(-1)
        centers.append(left)
        contexts.append(right)
        centers.append(right)
        contexts.append(left)
    if not centers:
        return (np.empty(0, dtype=np.int64),) * 2
    return np.concatenate(centers), np.concatenate(contexts)


@dataclass
class DeepWalkModel:
    ids: list[str]
    w_in: np.ndarray   # (n, dim) input-side vectors
    w_out: np.ndarray  # (n, dim) context-side vectors
    cfg: DeepWalkConfig
    isolated_count: int = 0
    epoch_losses: list[float] = None

    def embedding_matrix(self, method: str = "deepwalk") -> EmbeddingMatrix:
        norms = np.linalg.norm(self.w_in, axis=1, keepdims=True)
        dense = self.w_in / np.maximum(norms, 1e-12)
        return EmbeddingMatrix(method, self.cfg.dim, list(self.ids), dense=dense)


def _sgns_epochs(w_in, w_out, centers, contexts, noise_cdf, cfg, rng,
                 trainable=None):
    """Run cfg.epochs of SGD over the pair list; returns per-epoch mean loss.

    ``trainable`` is an optional boolean mask per node; when given, only
    those rows receive updates (used when folding new nodes into a frozen
    base model).
    """
    n_pairs = len(centers)
    losses = []
    m = cfg.negative_samples
    lr = cfg.learning_rate
    for _ in range(cfg.epochs):
        order = rng.permutation(n_pairs)
        total, count = 0.0, 0
        for lo in range(0, n_pairs, cfg.batch_size):
            sel = order[lo:lo + cfg.batch_size]
            c, x = centers[sel], contexts[sel]
            neg = np.searchsorted(noise_cdf, rng.random((len(sel), m)),
                                  side="right")
            v = w_in[c]
            u = w_out[x]
            un = w_out[neg]
            s_pos = sigmoid(np.einsum("bd,bd->b", v, u))
            s_neg = sigmoid(np.einsum("bd,bmd->bm", v, un))
            g_pos = s_pos - 1.0
            g_neg = s_neg
            dv = g_pos[:, None] * u + np.einsum("bm,bmd->bd", g_neg, un)
            du = g_pos[:, None] * v
            dun = g_neg[..., None] * v[:, None, :]
            if trainable is None:
                np.add.at(w_in, c, -lr * dv)
                np.add.at(w_out, x, -lr * du)
                np.add.at(w_out, neg.reshape(-1), -lr * dun.reshape(-1, cfg.dim))
            else:
                kc = trainable[c]
                kx = trainable[x]
                flat_neg = neg.reshape(-1)
                kn = trainable[flat_neg]
                np.add.at(w_in, c[kc], -lr * dv[kc])
                np.add.at(w_out, x[kx], -lr * du[kx])
                np.add.at(w_out, flat_neg[kn],
                          -lr * dun.reshape(-1, cfg.dim)[kn])
            eps = 1e-10
            total += float(-np.log(np.maximum(s_pos, eps)).sum()
                           - np.log(np.maximum(1.0 - s_neg, eps)).sum())
            count += len(sel)
        losses.append(total / max(count, 1))
    return losses


def train_deepwalk(g: GraphSnapshot, cfg: DeepWalkConfig) -> DeepWalkModel:
    if len(g) == 0:
        raise ValueError("cannot embed an empty graph")
    nodes, _, degs, offsets, flat = _csr(g)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    w_in = (rng.random((len(nodes), cfg.dim)) - 0.5) / cfg.dim
    w_out = np.zeros((len(nodes), cfg.dim))
    walks = _walk_matrix(degs, offsets, flat, cfg.walks_per_node,
                         cfg.walk_length, rng)
    centers, contexts = _skipgram_pairs(walks, cfg.window)
    isolated = int(np.sum(degs == 0))
    if isolated:
        log.warning("%d isolated nodes keep their initialized vectors", isolated)
    noise = degs.astype(float) ** 0.75
    if noise.sum() == 0:
        noise = np.ones_like(noise)
    noise_cdf = np.cumsum(noise / noise.sum())
    losses = _sgns_epochs(w_in, w_out, centers, contexts, noise_cdf, cfg, rng)
    return DeepWalkModel(nodes, w_in, w_out, cfg, isolated, losses)


def deepwalk_embed(g: GraphSnapshot, cfg: DeepWalkConfig) -> EmbeddingMatrix:
    """Train on the snapshot and return L2-normalized input-side vectors."""
    return train_deepwalk(g, cfg).embedding_matrix()


def deepwalk_fold_in(base: DeepWalkModel, g_eval: GraphSnapshot,
                     seed: int) -> DeepWalkModel:
    """Embed nodes that are new in ``g_eval`` without disturbing base rows.

    Walks are generated on the evaluation graph; only pairs touching a new
    node are trained, and updates are masked so the base vectors stay
    frozen. The returned model covers all nodes of ``g_eval``.
    """
    nodes, index, degs, offsets, flat = _csr(g_eval)
    base_index = {pid: i for i, pid in enumerate(base.ids)}
    missing = [pid for pid in base.ids if pid not in index]
    if missing:
        raise ValueError(f"evaluation graph lacks {len(missing)} base nodes "
                         f"(e.g. {missing[0]!r})")
    cfg = replace(base.cfg, seed=seed)
    rng = np.random.Generator(np.random.PCG64(seed))
    w_in = (rng.random((len(nodes), cfg.dim)) - 0.5) / cfg.dim
    w_out = np.zeros((len(nodes), cfg.dim))
    is_new = np.ones(len(nodes), dtype=bool)
    for pid, i in index.items():
        j = base_index.get(pid)
        if j is not None:
            w_in[i] = base.w_in[j]
            w_out[i] = base.w_out[j]
            is_new[i] = False
    walks = _walk_matrix(degs, offsets, flat, cfg.walks_per_node,
                         cfg.walk_length, rng)
    centers, contexts = _skipgram_pairs(walks, cfg.window)
    touch = is_new[centers] | is_new[contexts]
    centers, contexts = centers[touch], contexts[touch]
    noise = degs.astype(float) ** 0.75
    if noise.sum() == 0:
        noise = np.ones_like(noise)
    noise_cdf = np.cumsum(noise / noise.sum())
    losses = _sgns_epochs(w_in, w_out, centers, contexts, noise_cdf, cfg, rng,
                          trainable=is_new)
    new_isolated = int(np.sum((degs == 0) & is_new))
    return DeepWalkModel(nodes, w_in, w_out, cfg,
                         base.isolated_count + new_isolated, losses)
