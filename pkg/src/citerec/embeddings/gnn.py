"""Two-branch GNN layers over citation snapshots.

Both architectures share one layer form: for a node v with (sampled)
undirected neighbors,

    h_v = l2norm( act( w_self @ h_v_prev + w_neigh @ aggregate + bias ) )

``sage-mean`` aggregates all neighbor vectors with an element-wise mean.
``combsage`` first groups the neighbors into connected components of the
subgraph they induce, averages within each component, then combines the
component averages (mean by default), so a small neighbor group carries as
much weight as a large one.

Training is unsupervised link prediction: observed citation edges are
scored toward 1 and uniformly sampled node pairs toward 0 through the dot
product of the endpoint embeddings. Inference always uses the full
neighborhood, so nodes unseen during training embed without retraining.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..corpus import GraphSnapshot
from ..matrix import EmbeddingMatrix
from ..nncore import (activate, activate_grad, glorot_init, init_optimizer,
                      sigmoid, step_arrays, _read_array, _write_array)

log = logging.getLogger("citerec.gnn")

_NORM_EPS = 1e-12

ARCHITECTURES = ("sage-mean", "combsage")
COMBINES = ("mean", "sum", "max")


# --- aggregation primitives -------------------------------------------------

def sage_aggregate(neighbor_vectors) -> np.ndarray:
    """Element-wise mean of the neighbor vectors; rejects the empty list."""
    vecs = [np.asarray(v, dtype=float) for v in neighbor_vectors]
    if not vecs:
        raise ValueError("empty neighbor list; callers substitute a zero "
                         "vector for isolated nodes")
    dims = {v.shape for v in vecs}
    if len(dims) != 1:
        raise ValueError(f"neighbor vectors disagree on dimension: {dims}")
    return np.stack(vecs).mean(axis=0)


def combsage_aggregate(partitioned_vectors, combine: str = "mean",
                       dim: int | None = None) -> np.ndarray:
    """Mean each component separately, then combine the component means.

    With the default mean combination every component contributes equally
    regardless of its size. An empty component list stands for an isolated
    node and yields a zero vector (``dim`` must then be supplied).
    """
    if combine not in COMBINES:
        raise ValueError(f"combine must be one of {COMBINES}, got {combine!r}")
    comps = [[np.asarray(v, dtype=float) for v in comp]
             for comp in partitioned_vectors]
    if not comps:
        if dim is None:
            raise ValueError("dim is required to build the zero vector for "
                             "an empty component list")
        return np.zeros(dim)
    if any(not comp for comp in comps):
        raise ValueError("components must be nonempty")
    means = np.stack([np.stack(comp).mean(axis=0) for comp in comps])
    if combine == "mean":
        return means.mean(axis=0)
    if combine == "sum":
        return means.sum(axis=0)
    return means.max(axis=0)


# --- model ------------------------------------------------------------------

@dataclass(frozen=True)
class GnnConfig:
    arch: str = "sage-mean"
    dim: int = 128
    depth: int = 2
    sample_sizes: tuple[int, ...] = (25, 10)
    activation: str = "sigmoid"
    component_combine: str = "mean"

    def __post_init__(self):
        if self.arch not in ARCHITECTURES:
            raise ValueError(f"arch must be one of {ARCHITECTURES}")
        if self.component_combine not in COMBINES:
            raise ValueError(f"component_combine must be one of {COMBINES}")
        if len(self.sample_sizes) != self.depth:
            raise ValueError("need one sample size per layer")
        if self.dim < 1 or self.depth < 1 or any(s < 1 for s in self.sample_sizes):
            raise ValueError("dim, depth, and sample sizes must be positive")


@dataclass
class GnnLayer:
    w_self: np.ndarray   # (out, in)
    w_neigh: np.ndarray  # (out, in)
    bias: np.ndarray     # (out,)


@dataclass
class GnnModel:
    cfg: GnnConfig
    feature_dim: int
    layers: list[GnnLayer]
    epoch_losses: list[float] = field(default_factory=list)

    def arrays(self) -> list[np.ndarray]:
        out = []
        for layer in self.layers:
            out.extend((layer.w_self, layer.w_neigh, layer.bias))
        return out


def init_gnn(cfg: GnnConfig, feature_dim: int,
             rng: np.random.Generator) -> GnnModel:
    dims = [feature_dim] + [cfg.dim] * cfg.depth
    layers = [GnnLayer(glorot_init(dims[i + 1], dims[i], rng),
                       glorot_init(dims[i + 1], dims[i], rng),
                       np.zeros(dims[i + 1]))
              for i in range(cfg.depth)]
    return GnnModel(cfg, feature_dim, layers)


# --- neighborhood plans -------------------------------------------------------

class _IndexedGraph:
    """Integer view of a snapshot's undirected adjacency. Node index order
    equals ascending id order, so integer sorting reproduces id sorting."""

    def __init__(self, g: GraphSnapshot):
        self.nodes: list[str] = list(g.nodes)
        self.index = {v: i for i, v in enumerate(self.nodes)}
        self.adj = [np.array([self.index[u] for u in g.und_neighbors(v)],
                             dtype=np.int64) for v in self.nodes]
        self.adj_sets = [frozenset(int(x) for x in a) for a in self.adj]


def _partition_members(members, ig: _IndexedGraph) -> list[list[int]]:
    """Connected components of the subgraph induced on ``members`` (sorted
    integer node indices), ordered by smallest member."""
    k = len(members)
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        adj = ig.adj_sets[members[i]]
        for j in range(i + 1, k):
            if members[j] in adj:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups: dict[int, list[int]] = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(members[i])
    comps = [sorted(c) for c in groups.values()]
    comps.sort(key=lambda c: c[0])
    return comps


@dataclass
class _Block:
    out_idx: list[int]   # node indices whose representations this layer emits
    in_idx: list[int]    # node indices of the layer input, out_idx first
    self_pos: np.ndarray
    mem_src: np.ndarray
    mem_comp: np.ndarray
    mem_w: np.ndarray
    comp_node: np.ndarray
    comp_w: np.ndarray
    n_comp: int

    @property
    def n_out(self) -> int:
        return len(self.out_idx)


def _build_block(ig: _IndexedGraph, out_idx: list[int], fanout: int | None,
                 rng: np.random.Generator | None, cfg: GnnConfig,
                 partition_cache: dict | None = None) -> _Block:
    in_idx = list(out_idx)
    pos = {v: i for i, v in enumerate(out_idx)}
    mem_src: list[int] = []
    mem_comp: list[int] = []
    mem_w: list[float] = []
    comp_node: list[int] = []
    comp_w: list[float] = []
    n_comp = 0
    combine = cfg.component_combine
    combsage = cfg.arch == "combsage"
    adj = ig.adj
    for oi, v in enumerate(out_idx):
        nbrs = adj[v]
        sampled = fanout is not None and len(nbrs) > fanout
        if sampled:
            chosen = rng.choice(len(nbrs), size=fanout, replace=False)
            chosen.sort()
            members = [int(x) for x in nbrs[chosen]]
        else:
            members = [int(x) for x in nbrs]
        if not members:
            continue
        if combsage:
            if sampled or partition_cache is None:
                comps = _partition_members(members, ig)
            else:
                # the full neighborhood partition is a property of the graph
                comps = partition_cache.get(v)
                if comps is None:
                    comps = _partition_members(members, ig)
                    partition_cache[v] = comps
        else:
            comps = [members]
        weight = 1.0 / len(comps) if combine == "mean" else 1.0
        for comp in comps:
            comp_node.append(oi)
            comp_w.append(weight)
            inv = 1.0 / len(comp)
            for member in comp:
                p = pos.get(member)
                if p is None:
                    p = len(in_idx)
                    pos[member] = p
                    in_idx.append(member)
                mem_src.append(p)
                mem_comp.append(n_comp)
                mem_w.append(inv)
            n_comp += 1
    return _Block(out_idx, in_idx, np.arange(len(out_idx)),
                  np.array(mem_src, dtype=np.int64),
                  np.array(mem_comp, dtype=np.int64),
                  np.array(mem_w),
                  np.array(comp_node, dtype=np.int64),
                  np.array(comp_w), n_comp)


@dataclass
class _Plan:
    target_idx: list[int]
    blocks: list[_Block]  # blocks[0] consumes raw features


def _make_plan(ig: _IndexedGraph, target_idx: list[int], cfg: GnnConfig,
               rng: np.random.Generator | None, full: bool,
               partition_cache: dict | None = None) -> _Plan:
    top_down = []
    cur = list(target_idx)
    for l in range(cfg.depth):
        fan = None if full else cfg.sample_sizes[l]
        blk = _build_block(ig, cur, fan, rng, cfg, partition_cache)
        top_down.append(blk)
        cur = blk.in_idx
    return _Plan(list(target_idx), list(reversed(top_down)))


def _scatter_rows(idx: np.ndarray, rows: np.ndarray, n_out: int) -> np.ndarray:
    """Row-wise scatter-add: stable-sort rows by destination and segment-sum
    with one reduceat pass. Within-segment row order is the original row
    order, so the result is deterministic for fixed inputs (reduceat's
    pairwise summation differs from np.add.at only at rounding level)."""
    out = np.zeros((n_out, rows.shape[1]))
    if len(idx) == 0:
        return out
    order = np.argsort(idx, kind="stable")
    sidx = idx[order]
    starts = np.flatnonzero(np.concatenate(([True], sidx[1:] != sidx[:-1])))
    out[sidx[starts]] = np.add.reduceat(rows[order], starts, axis=0)
    return out


# --- forward / backward -------------------------------------------------------

def _aggregate_forward(blk: _Block, H: np.ndarray, combine: str):
    d = H.shape[1]
    if blk.n_comp == 0:
        return np.zeros((0, d)), np.zeros((blk.n_out, d))
    comp = _scatter_rows(blk.mem_comp, blk.mem_w[:, None] * H[blk.mem_src],
                         blk.n_comp)
    if combine == "max":
        agg = np.full((blk.n_out, d), -np.inf)
        np.maximum.at(agg, blk.comp_node, comp)
        agg[np.isinf(agg)] = 0.0
    else:
        agg = _scatter_rows(blk.comp_node, blk.comp_w[:, None] * comp,
                            blk.n_out)
    return comp, agg


def _aggregate_backward(blk: _Block, comp: np.ndarray, agg: np.ndarray,
                        dagg: np.ndarray, combine: str) -> np.ndarray:
    if blk.n_comp == 0:
        return np.zeros((0, dagg.shape[1]))
    if combine == "max":
        # gradient flows to the first component row attaining the max
        dcomp = np.zeros_like(comp)
        claimed = np.zeros_like(agg, dtype=bool)
        for row in range(blk.n_comp):
            node = blk.comp_node[row]
            winner = (comp[row] == agg[node]) & ~claimed[node]
            dcomp[row][winner] = dagg[node][winner]
            claimed[node] |= winner
        return dcomp
    return blk.comp_w[:, None] * dagg[blk.comp_node]


def _forward_plan(model: GnnModel, plan: _Plan, feats_aligned: np.ndarray):
    """Layer-wise forward. For the linear combines (mean, sum) the neighbor
    projection commutes with aggregation, so rows are projected to the layer
    output width first and aggregated there; max must aggregate in input
    space since the projection does not commute with the element-wise max."""
    H = feats_aligned[plan.blocks[0].in_idx]
    caches = []
    combine = model.cfg.component_combine
    linear = combine != "max"
    for layer, blk in zip(model.layers, plan.blocks):
        if linear:
            projected = H @ layer.w_neigh.T
            comp, agg_p = _aggregate_forward(blk, projected, combine)
            z = H[blk.self_pos] @ layer.w_self.T + agg_p + layer.bias
            comp = agg = None
        else:
            comp, agg = _aggregate_forward(blk, H, combine)
            z = H[blk.self_pos] @ layer.w_self.T + agg @ layer.w_neigh.T \
                + layer.bias
        a = activate(model.cfg.activation, z)
        norms = np.maximum(np.linalg.norm(a, axis=1, keepdims=True), _NORM_EPS)
        out = a / norms
        caches.append((H, comp, agg, z, a, norms, out))
        H = out
    return H, caches


def _backward_plan(model: GnnModel, plan: _Plan, caches,
                   d_out: np.ndarray) -> list[np.ndarray]:
    grads = [np.zeros_like(arr) for arr in model.arrays()]
    combine = model.cfg.component_combine
    linear = combine != "max"
    dH = d_out
    for li in range(model.cfg.depth - 1, -1, -1):
        layer, blk = model.layers[li], plan.blocks[li]
        H_in, comp, agg, z, a, norms, out = caches[li]
        proj = np.sum(dH * out, axis=1, keepdims=True)
        da = (dH - out * proj) / norms
        dz = da * activate_grad(model.cfg.activation, z, a)
        grads[3 * li] += dz.T @ H_in[blk.self_pos]
        grads[3 * li + 2] += dz.sum(axis=0)
        dH_in = _scatter_rows(blk.self_pos, dz @ layer.w_self, len(H_in))
        if linear:
            # z took the aggregate of projected rows directly, so dz is the
            # gradient at the aggregate; push it back through both stages,
            # then through the projection
            if blk.n_comp:
                dcomp = blk.comp_w[:, None] * dz[blk.comp_node]
                d_projected = _scatter_rows(
                    blk.mem_src, blk.mem_w[:, None] * dcomp[blk.mem_comp],
                    len(H_in))
                grads[3 * li + 1] += d_projected.T @ H_in
                dH_in += d_projected @ layer.w_neigh
        else:
            grads[3 * li + 1] += dz.T @ agg
            dagg = dz @ layer.w_neigh
            dcomp = _aggregate_backward(blk, comp, agg, dagg, combine)
            if blk.n_comp:
                dH_in += _scatter_rows(
                    blk.mem_src, blk.mem_w[:, None] * dcomp[blk.mem_comp],
                    len(H_in))
        dH = dH_in
    return grads


def _pair_loss(H: np.ndarray, left: np.ndarray, right: np.ndarray,
               labels: np.ndarray):
    """Mean BCE of sigmoid(h_left . h_right) against the labels.

    Returns (loss, dH) with gradients accumulated for both endpoints.
    """
    logits = np.einsum("bd,bd->b", H[left], H[right])
    loss = float(np.mean(np.logaddexp(0.0, logits) - labels * logits))
    dlogit = (sigmoid(logits) - labels) / len(labels)
    dH = _scatter_rows(left, dlogit[:, None] * H[right], len(H))
    dH += _scatter_rows(right, dlogit[:, None] * H[left], len(H))
    return loss, dH


# --- training / inference -----------------------------------------------------

@dataclass(frozen=True)
class GnnTrainConfig:
    epochs: int = 10
    batch_edges: int = 256
    negatives: int = 5
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0 or self.batch_edges < 1 or self.negatives < 1:
            raise ValueError("bad training configuration")


def _check_features(features: EmbeddingMatrix, g: GraphSnapshot) -> None:
    missing = features.missing(g.nodes)
    if missing:
        raise ValueError(f"features missing for {len(missing)} nodes "
                         f"(e.g. {missing[0]!r})")


def gnn_train(g: GraphSnapshot, features: EmbeddingMatrix, cfg: GnnConfig,
              train_cfg: GnnTrainConfig) -> GnnModel:
    """Fit layer parameters by link prediction on the snapshot's edges."""
    _check_features(features, g)
    if not g.directed_edges:
        raise ValueError("graph has no edges to train on")
    rng = np.random.Generator(np.random.PCG64(train_cfg.seed))
    model = init_gnn(cfg, features.dim, rng)
    opt = init_optimizer(model.arrays(), train_cfg.optimizer,
                         train_cfg.learning_rate)
    ig = _IndexedGraph(g)
    feats_aligned = features.take(ig.nodes).astype(float)
    edges = [(ig.index[u], ig.index[v]) for u, v in g.directed_edges]
    n_nodes = len(ig.nodes)
    m = train_cfg.negatives
    partition_cache: dict = {}
    for epoch in range(train_cfg.epochs):
        order = rng.permutation(len(edges))
        total, batches = 0.0, 0
        for lo in range(0, len(edges), train_cfg.batch_edges):
            batch = [edges[i] for i in order[lo:lo + train_cfg.batch_edges]]
            negs = rng.integers(0, n_nodes, size=(len(batch), m))
            ids = sorted({u for e in batch for u in e}
                         | {int(i) for i in negs.flat})
            plan = _make_plan(ig, ids, cfg, rng, full=False,
                              partition_cache=partition_cache)
            H, caches = _forward_plan(model, plan, feats_aligned)
            pos = {v: i for i, v in enumerate(plan.target_idx)}
            left = np.array([pos[u] for u, _ in batch]
                            + [pos[u] for u, _ in batch for _ in range(m)])
            right = np.array([pos[v] for _, v in batch]
                             + [pos[int(j)] for row in negs for j in row])
            labels = np.concatenate([np.ones(len(batch)),
                                     np.zeros(len(batch) * m)])
            loss, dH = _pair_loss(H, left, right, labels)
            if not np.isfinite(loss):
                raise FloatingPointError(
                    f"non-finite loss at epoch {epoch}, batch offset {lo}")
            grads = _backward_plan(model, plan, caches, dH)
            step_arrays(model.arrays(), grads, opt)
            total += loss
            batches += 1
        model.epoch_losses.append(total / max(batches, 1))
        log.debug("epoch %d mean loss %.6f", epoch, model.epoch_losses[-1])
    return model


def gnn_infer(model: GnnModel, g: GraphSnapshot, features: EmbeddingMatrix,
              nodes: list[str]) -> EmbeddingMatrix:
    """Full-neighborhood forward pass for the requested nodes."""
    _check_features(features, g)
    for v in nodes:
        if not g.has_node(v):
            raise KeyError(f"unknown node {v!r}")
    if features.dim != model.feature_dim:
        raise ValueError(f"feature dim {features.dim} != model "
                         f"feature dim {model.feature_dim}")
    ig = _IndexedGraph(g)
    feats_aligned = features.take(ig.nodes).astype(float)
    plan = _make_plan(ig, [ig.index[v] for v in nodes], model.cfg, None,
                      full=True, partition_cache={})
    H, _ = _forward_plan(model, plan, feats_aligned)
    return EmbeddingMatrix(model.cfg.arch, model.cfg.dim, list(nodes),
                           dense=H.copy())


def gnn_loss(model: GnnModel, plan: _Plan, feats_aligned: np.ndarray,
             left: np.ndarray, right: np.ndarray, labels: np.ndarray) -> float:
    H, _ = _forward_plan(model, plan, feats_aligned)
    loss, _ = _pair_loss(H, left, right, labels)
    return loss


def gnn_finite_difference_check(model: GnnModel, g: GraphSnapshot,
                                features: EmbeddingMatrix,
                                edges: list[tuple[str, str]],
                                negatives: int = 2, seed: int = 0,
                                eps: float = 1e-5,
                                max_coords: int = 60) -> float:
    """Central-difference check of the full training gradient path.

    The neighborhood plan and negative pairs are frozen so the loss is a
    deterministic function of the parameters.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    ig = _IndexedGraph(g)
    feats_aligned = features.take(ig.nodes).astype(float)
    int_edges = [(ig.index[u], ig.index[v]) for u, v in edges]
    negs = rng.integers(0, len(ig.nodes), size=(len(edges), negatives))
    ids = sorted({u for e in int_edges for u in e}
                 | {int(i) for i in negs.flat})
    plan = _make_plan(ig, ids, model.cfg, rng, full=False)
    pos = {v: i for i, v in enumerate(plan.target_idx)}
    left = np.array([pos[u] for u, _ in int_edges]
                    + [pos[u] for u, _ in int_edges for _ in range(negatives)])
    right = np.array([pos[v] for _, v in int_edges]
                     + [pos[int(j)] for row in negs for j in row])
    labels = np.concatenate([np.ones(len(edges)),
                             np.zeros(len(edges) * negatives)])

    H, caches = _forward_plan(model, plan, feats_aligned)
    _, dH = _pair_loss(H, left, right, labels)
    analytic = _backward_plan(model, plan, caches, dH)

    arrays = model.arrays()
    sizes = [a.size for a in arrays]
    total = sum(sizes)
    n_check = min(total, max_coords)
    flat_idx = rng.choice(total, size=n_check, replace=False)
    bounds = np.cumsum([0] + sizes)
    worst = 0.0
    for fi in sorted(flat_idx):
        ai = int(np.searchsorted(bounds, fi, side="right") - 1)
        off = fi - bounds[ai]
        flat = arrays[ai].reshape(-1)
        orig = flat[off]
        flat[off] = orig + eps
        up = gnn_loss(model, plan, feats_aligned, left, right, labels)
        flat[off] = orig - eps
        down = gnn_loss(model, plan, feats_aligned, left, right, labels)
        flat[off] = orig
        g_fd = (up - down) / (2.0 * eps)
        g_an = analytic[ai].reshape(-1)[off]
        worst = max(worst, abs(g_an - g_fd) / max(abs(g_an), abs(g_fd), 1e-8))
    return worst


# --- checkpoint io -------------------------------------------------------------

GNN_MAGIC = "gnncheckpoint v1"


def save_gnn(model: GnnModel, path: str) -> None:
    cfg = model.cfg
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(GNN_MAGIC + "\n")
        fh.write(f"arch {cfg.arch}\n")
        fh.write(f"depth {cfg.depth}\n")
        fh.write("samples " + ",".join(str(s) for s in cfg.sample_sizes) + "\n")
        fh.write(f"activation {cfg.activation}\n")
        fh.write(f"combine {cfg.component_combine}\n")
        fh.write(f"feature_dim {model.feature_dim}\n")
        fh.write(f"dim {cfg.dim}\n")
        for layer in model.layers:
            out_dim, in_dim = layer.w_self.shape
            fh.write(f"layer {in_dim} {out_dim}\n")
            for r in range(out_dim):
                _write_array(fh, "ws", layer.w_self[r])
            for r in range(out_dim):
                _write_array(fh, "wn", layer.w_neigh[r])
            _write_array(fh, "b", layer.bias)


def _expect(fh, tag: str) -> list[str]:
    parts = fh.readline().split()
    if not parts or parts[0] != tag:
        raise ValueError(f"expected {tag!r} in checkpoint")
    return parts[1:]


def load_gnn(path: str) -> GnnModel:
    with open(path, encoding="utf-8") as fh:
        if fh.readline().strip() != GNN_MAGIC:
            raise ValueError("bad gnn checkpoint header")
        arch = _expect(fh, "arch")[0]
        depth = int(_expect(fh, "depth")[0])
        samples = tuple(int(s) for s in _expect(fh, "samples")[0].split(","))
        activation = _expect(fh, "activation")[0]
        combine = _expect(fh, "combine")[0]
        feature_dim = int(_expect(fh, "feature_dim")[0])
        dim = int(_expect(fh, "dim")[0])
        cfg = GnnConfig(arch, dim, depth, samples, activation, combine)
        layers = []
        for _ in range(depth):
            spec = _expect(fh, "layer")
            in_dim, out_dim = int(spec[0]), int(spec[1])
            ws = np.stack([_read_array(fh.readline().rstrip("\n"), "ws", (in_dim,))
                           for _ in range(out_dim)])
            wn = np.stack([_read_array(fh.readline().rstrip("\n"), "wn", (in_dim,))
                           for _ in range(out_dim)])
            bias = _read_array(fh.readline().rstrip("\n"), "b", (out_dim,))
            layers.append(GnnLayer(ws, wn, bias))
    return GnnModel(cfg, feature_dim, layers)
