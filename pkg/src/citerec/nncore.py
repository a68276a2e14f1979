"""Dense feed-forward machinery shared by the skip-gram trainer, the GNN
layers, and the MLP scorer: forward, exact reverse-mode gradients for
weighted binary cross-entropy, SGD/Adam steps, and a finite-difference
gradient check.

Everything is float64 numpy. Training is deterministic given seeds and
data order; checkpoints round-trip byte-identically (values are written
with repr, which is exact for float64).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PROB_CLAMP = 1e-7

ACTIVATIONS = ("sigmoid", "relu", "identity")


def sigmoid(z: np.ndarray) -> np.ndarray:
    # overflow-safe: evaluate exp only on the non-growing branch
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "sigmoid":
        return sigmoid(z)
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "identity":
        return z
    raise ValueError(f"unknown activation {name!r}")


def activate_grad(name: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    """d activation / d preactivation, given both preactivation and output."""
    if name == "sigmoid":
        return a * (1.0 - a)
    if name == "relu":
        return (z > 0).astype(float)
    if name == "identity":
        return np.ones_like(z)
    raise ValueError(f"unknown activation {name!r}")


@dataclass
class DenseLayer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray     # (out,)
    activation: str

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise ValueError("layer shapes do not compose")


@dataclass
class DenseParams:
    layers: list[DenseLayer]

    def __post_init__(self):
        for prev, cur in zip(self.layers, self.layers[1:]):
            if cur.weights.shape[1] != prev.weights.shape[0]:
                raise ValueError("adjacent layer dimensions do not compose")

    @property
    def input_dim(self) -> int:
        return self.layers[0].weights.shape[1]

    @property
    def output_dim(self) -> int:
        return self.layers[-1].weights.shape[0]

    def arrays(self) -> list[np.ndarray]:
        out = []
        for layer in self.layers:
            out.append(layer.weights)
            out.append(layer.bias)
        return out

    def copy(self) -> "DenseParams":
        return DenseParams([DenseLayer(l.weights.copy(), l.bias.copy(), l.activation)
                            for l in self.layers])


def glorot_init(fan_out: int, fan_in: int, rng: np.random.Generator) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_out, fan_in))


def init_dense(dims: list[int], activations: list[str],
               rng: np.random.Generator) -> DenseParams:
    """Fresh parameters for layer sizes dims[0] -> dims[1] -> ... -> dims[-1]."""
    if len(activations) != len(dims) - 1:
        raise ValueError("need one activation per layer")
    layers = [DenseLayer(glorot_init(dims[i + 1], dims[i], rng),
                         np.zeros(dims[i + 1]), activations[i])
              for i in range(len(dims) - 1)]
    return DenseParams(layers)


def forward(params: DenseParams, x: np.ndarray) -> np.ndarray:
    """Apply the network to one vector (1-d) or a batch (2-d, rows are examples)."""
    a = np.asarray(x, dtype=float)
    single = a.ndim == 1
    if single:
        a = a[None, :]
    if a.shape[1] != params.input_dim:
        raise ValueError(f"input dim {a.shape[1]} != expected {params.input_dim}")
    for layer in params.layers:
        a = activate(layer.activation, a @ layer.weights.T + layer.bias)
    return a[0] if single else a


def _forward_cached(params: DenseParams, X: np.ndarray):
    acts = [X]
    preacts = []
    a = X
    for layer in params.layers:
        z = a @ layer.weights.T + layer.bias
        a = activate(layer.activation, z)
        preacts.append(z)
        acts.append(a)
    return acts, preacts


def bce_loss(p: np.ndarray, t: np.ndarray) -> np.ndarray:
    pc = np.clip(p, PROB_CLAMP, 1.0 - PROB_CLAMP)
    return -(t * np.log(pc) + (1.0 - t) * np.log(1.0 - pc))


@dataclass
class DenseGrads:
    layers: list[tuple[np.ndarray, np.ndarray]]  # (dW, db) per layer

    def arrays(self) -> list[np.ndarray]:
        out = []
        for dw, db in self.layers:
            out.append(dw)
            out.append(db)
        return out


def grad(params: DenseParams, batch, loss: str = "binary-cross-entropy"):
    """Exact gradients of the weighted-mean BCE over a batch.

    ``batch`` is a list of (x, target, weight) with targets in {0, 1}, or a
    tuple (X, t, w) of stacked arrays. The loss is sum(w_i * bce_i) / sum(w),
    so duplicating an example is equivalent to doubling its weight.
    Returns (DenseGrads, scalar loss).
    """
    if loss != "binary-cross-entropy":
        raise ValueError(f"unsupported loss {loss!r}")
    if isinstance(batch, tuple):
        X, t, w = batch
        X = np.asarray(X, dtype=float)
        t = np.asarray(t, dtype=float)
        w = np.asarray(w, dtype=float)
    else:
        if not batch:
            raise ValueError("empty batch")
        X = np.stack([np.asarray(b[0], dtype=float) for b in batch])
        t = np.array([float(b[1]) for b in batch])
        w = np.array([float(b[2]) if len(b) > 2 else 1.0 for b in batch])
    if params.output_dim != 1:
        raise ValueError("binary cross-entropy requires a scalar output")
    if X.shape[1] != params.input_dim:
        raise ValueError(f"input dim {X.shape[1]} != expected {params.input_dim}")

    acts, preacts = _forward_cached(params, X)
    p = acts[-1][:, 0]
    if not np.all(np.isfinite(p)):
        raise FloatingPointError("non-finite activations in forward pass")
    wsum = w.sum()
    total = float((w * bce_loss(p, t)).sum() / wsum)

    # dL/dp is zero inside the clamp region, (p-t)/(p(1-p)) otherwise
    pc = np.clip(p, PROB_CLAMP, 1.0 - PROB_CLAMP)
    inside = (p > PROB_CLAMP) & (p < 1.0 - PROB_CLAMP)
    dldp = np.where(inside, (pc - t) / (pc * (1.0 - pc)), 0.0) * (w / wsum)

    delta = dldp[:, None]  # gradient wrt layer output, batch x out
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(params.layers)
    for li in range(len(params.layers) - 1, -1, -1):
        layer = params.layers[li]
        dz = delta * activate_grad(layer.activation, preacts[li], acts[li + 1])
        grads[li] = (dz.T @ acts[li], dz.sum(axis=0))
        if li > 0:
            delta = dz @ layer.weights
    return DenseGrads(grads), total


@dataclass
class OptimizerState:
    kind: str
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step_count: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)


def init_optimizer(arrays: list[np.ndarray], kind: str = "adam",
                   lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
                   eps: float = 1e-8) -> OptimizerState:
    if kind not in ("sgd", "adam"):
        raise ValueError(f"optimizer must be sgd or adam, got {kind!r}")
    state = OptimizerState(kind, lr, beta1, beta2, eps)
    if kind == "adam":
        state.m = [np.zeros_like(a) for a in arrays]
        state.v = [np.zeros_like(a) for a in arrays]
    return state


def step_arrays(arrays: list[np.ndarray], grads: list[np.ndarray],
                opt: OptimizerState) -> None:
    """One optimizer step, applied in place to the parameter arrays."""
    if len(arrays) != len(grads):
        raise ValueError("parameter/gradient count mismatch")
    for a, g in zip(arrays, grads):
        if a.shape != g.shape:
            raise ValueError(f"shape mismatch {a.shape} vs {g.shape}")
    opt.step_count += 1
    if opt.kind == "sgd":
        for a, g in zip(arrays, grads):
            a -= opt.lr * g
        return
    t = opt.step_count
    bc1 = 1.0 - opt.beta1 ** t
    bc2 = 1.0 - opt.beta2 ** t
    for a, g, m, v in zip(arrays, grads, opt.m, opt.v):
        m *= opt.beta1
        m += (1.0 - opt.beta1) * g
        v *= opt.beta2
        v += (1.0 - opt.beta2) * g * g
        a -= opt.lr * (m / bc1) / (np.sqrt(v / bc2) + opt.eps)


def step(params: DenseParams, grads: DenseGrads, opt: OptimizerState) -> DenseParams:
    step_arrays(params.arrays(), grads.arrays(), opt)
    return params


def _loss_only(params: DenseParams, batch) -> float:
    _, value = grad(params, batch)
    return value


def finite_difference_check(params: DenseParams, batch, eps: float = 1e-5,
                            seed: int = 0, fraction: float = 0.01,
                            min_coords: int = 50) -> float:
    """Max relative error between analytic and central-difference gradients.

    Checks a random sample of coordinates (``fraction`` of the total, at
    least ``min_coords``); relative error uses max(|ga|, |gf|, 1e-8) as the
    denominator.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    analytic, _ = grad(params, batch)
    arrays = params.arrays()
    ganalytic = analytic.arrays()
    sizes = [a.size for a in arrays]
    total = sum(sizes)
    n_check = min(total, max(min_coords, int(round(fraction * total))))
    rng = np.random.Generator(np.random.PCG64(seed))
    flat_idx = rng.choice(total, size=n_check, replace=False)

    worst = 0.0
    bounds = np.cumsum([0] + sizes)
    for fi in sorted(flat_idx):
        ai = int(np.searchsorted(bounds, fi, side="right") - 1)
        off = fi - bounds[ai]
        arr = arrays[ai]
        flat = arr.reshape(-1)
        orig = flat[off]
        flat[off] = orig + eps
        up = _loss_only(params, batch)
        flat[off] = orig - eps
        down = _loss_only(params, batch)
        flat[off] = orig
        g_fd = (up - down) / (2.0 * eps)
        g_an = ganalytic[ai].reshape(-1)[off]
        err = abs(g_an - g_fd) / max(abs(g_an), abs(g_fd), 1e-8)
        worst = max(worst, err)
    return worst


# --- checkpoint io ---------------------------------------------------------

CHECKPOINT_MAGIC = "densecheckpoint v1"


def _write_array(fh, tag: str, arr: np.ndarray) -> None:
    flat = arr.reshape(-1)
    fh.write(tag + " " + " ".join(repr(float(x)) for x in flat) + "\n")


def _read_array(line: str, tag: str, shape: tuple[int, ...]) -> np.ndarray:
    head, _, payload = line.partition(" ")
    if head != tag:
        raise ValueError(f"expected {tag!r} line, found {head!r}")
    values = [float(x) for x in payload.split()]
    arr = np.array(values).reshape(shape)
    return arr


def write_dense_checkpoint(params: DenseParams, fh) -> None:
    fh.write(CHECKPOINT_MAGIC + "\n")
    fh.write(f"layers {len(params.layers)}\n")
    for layer in params.layers:
        out_dim, in_dim = layer.weights.shape
        fh.write(f"layer {in_dim} {out_dim} {layer.activation}\n")
        for r in range(out_dim):
            _write_array(fh, "w", layer.weights[r])
        _write_array(fh, "b", layer.bias)


def read_dense_checkpoint(fh) -> DenseParams:
    magic = fh.readline().strip()
    if magic != CHECKPOINT_MAGIC:
        raise ValueError(f"bad checkpoint header {magic!r}")
    head = fh.readline().split()
    if len(head) != 2 or head[0] != "layers":
        raise ValueError("missing layer count")
    n_layers = int(head[1])
    layers = []
    for _ in range(n_layers):
        spec = fh.readline().split()
        if len(spec) != 4 or spec[0] != "layer":
            raise ValueError("malformed layer header")
        in_dim, out_dim, activation = int(spec[1]), int(spec[2]), spec[3]
        rows = [_read_array(fh.readline().rstrip("\n"), "w", (in_dim,))
                for _ in range(out_dim)]
        weights = np.stack(rows) if rows else np.zeros((0, in_dim))
        bias = _read_array(fh.readline().rstrip("\n"), "b", (out_dim,))
        layers.append(DenseLayer(weights, bias, activation))
    return DenseParams(layers)


def save_dense(params: DenseParams, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_dense_checkpoint(params, fh)


def load_dense(path: str) -> DenseParams:
    with open(path, encoding="utf-8") as fh:
        return read_dense_checkpoint(fh)
