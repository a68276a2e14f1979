import io
import math

import numpy as np
import pytest

from citerec import nncore
from citerec.nncore import (DenseLayer, DenseParams, finite_difference_check,
                            forward, grad, init_dense, init_optimizer, sigmoid,
                            step, step_arrays)


def rng(seed=0):
    return np.random.Generator(np.random.PCG64(seed))


def test_forward_identity():
    params = DenseParams([DenseLayer(np.eye(3), np.zeros(3), "identity")])
    x = np.array([1.0, -2.0, 0.5])
    assert np.array_equal(forward(params, x), x)


def test_forward_sigmoid_zero_wb():
    params = DenseParams([DenseLayer(np.zeros((2, 3)), np.zeros(2), "sigmoid")])
    out = forward(params, np.array([5.0, -1.0, 2.0]))
    assert np.allclose(out, 0.5)


def test_forward_hand_value():
    # sigma(ln 3) = 3/4 for W=[1,1], b=0, x=(ln3, 0)
    params = DenseParams([DenseLayer(np.array([[1.0, 1.0]]), np.zeros(1),
                                     "sigmoid")])
    out = forward(params, np.array([math.log(3.0), 0.0]))
    assert abs(out[0] - 0.75) < 1e-12


def test_forward_dim_mismatch():
    params = DenseParams([DenseLayer(np.eye(3), np.zeros(3), "identity")])
    with pytest.raises(ValueError):
        forward(params, np.zeros(4))


def test_sigmoid_overflow_safe():
    z = np.array([-1000.0, 0.0, 1000.0])
    s = sigmoid(z)
    assert np.all(np.isfinite(s))
    assert 0.0 <= s[0] < 1e-300 or s[0] == 0.0
    assert s[1] == 0.5
    assert s[2] == 1.0


def test_grad_zero_at_optimum():
    # network pinned at the correct labels -> clamped loss region, tiny grads
    params = DenseParams([DenseLayer(np.array([[30.0]]), np.zeros(1), "sigmoid")])
    batch = [(np.array([1.0]), 1, 1.0), (np.array([-1.0]), 0, 1.0)]
    grads, loss = grad(params, batch)
    assert loss < 1e-6
    assert all(np.all(np.abs(a) < 1e-6) for a in grads.arrays())


def test_grad_weight_equals_duplication():
    params = init_dense([3, 4, 1], ["sigmoid", "sigmoid"], rng(3))
    x = np.array([0.2, -0.4, 1.0])
    weighted = [(x, 1, 2.0)]
    duplicated = [(x, 1, 1.0), (x, 1, 1.0)]
    g1, l1 = grad(params, weighted)
    g2, l2 = grad(params, duplicated)
    assert l1 == pytest.approx(l2, abs=1e-15)
    for a, b in zip(g1.arrays(), g2.arrays()):
        assert np.allclose(a, b, atol=1e-15)


def test_grad_finite_difference_random_net():
    params = init_dense([4, 6, 3, 1], ["sigmoid", "sigmoid", "sigmoid"], rng(1))
    r = rng(2)
    batch = [(r.normal(size=4), int(r.integers(0, 2)), 1.0) for _ in range(8)]
    err = finite_difference_check(params, batch, eps=1e-5, seed=0)
    assert err < 1e-4


def test_fd_check_closed_form():
    # single sigmoid unit, one example: dL/dw = (p - t) x, checked symbolically
    w = 0.3
    params = DenseParams([DenseLayer(np.array([[w]]), np.zeros(1), "sigmoid")])
    x, t = 2.0, 1
    batch = [(np.array([x]), t, 1.0)]
    grads, _ = grad(params, batch)
    p = 1.0 / (1.0 + math.exp(-w * x))
    assert abs(grads.layers[0][0][0, 0] - (p - t) * x) < 1e-12
    assert finite_difference_check(params, batch, eps=1e-6) < 1e-6


def test_fd_check_detects_corruption():
    params = init_dense([3, 4, 1], ["sigmoid", "sigmoid"], rng(5))
    r = rng(6)
    batch = [(r.normal(size=3), int(r.integers(0, 2)), 1.0) for _ in range(5)]

    true_grad = nncore.grad

    def corrupted(params, batch, loss="binary-cross-entropy"):
        grads, value = true_grad(params, batch, loss)
        corrupted_layers = [(dw * 1.1, db * 1.1) for dw, db in grads.layers]
        return nncore.DenseGrads(corrupted_layers), value

    nncore.grad = corrupted
    try:
        err = finite_difference_check(params, batch, eps=1e-5)
    finally:
        nncore.grad = true_grad
    assert err > 1e-2


def test_sgd_step():
    params = DenseParams([DenseLayer(np.array([[1.0]]), np.zeros(1), "identity")])
    opt = init_optimizer(params.arrays(), "sgd", lr=0.1)
    grads = nncore.DenseGrads([(np.array([[2.0]]), np.zeros(1))])
    step(params, grads, opt)
    assert params.layers[0].weights[0, 0] == pytest.approx(0.8)


def test_sgd_zero_grad_no_change():
    params = init_dense([2, 2, 1], ["sigmoid", "sigmoid"], rng(7))
    before = [a.copy() for a in params.arrays()]
    opt = init_optimizer(params.arrays(), "sgd", lr=0.5)
    zeros = nncore.DenseGrads([(np.zeros_like(l.weights), np.zeros_like(l.bias))
                               for l in params.layers])
    step(params, zeros, opt)
    for a, b in zip(params.arrays(), before):
        assert np.array_equal(a, b)


def test_adam_first_step_magnitude():
    # bias correction makes m_hat/sqrt(v_hat) = 1 at t=1 for any constant grad
    lr = 1e-3
    for c in (0.5, 2.0, 100.0):
        arr = [np.array([1.0])]
        opt = init_optimizer(arr, "adam", lr=lr)
        step_arrays(arr, [np.array([c])], opt)
        assert abs((1.0 - arr[0][0]) - lr) < lr * 1e-6


def test_training_determinism():
    def run():
        params = init_dense([3, 5, 1], ["sigmoid", "sigmoid"], rng(11))
        opt = init_optimizer(params.arrays(), "adam", lr=1e-2)
        r = rng(12)
        batch = [(r.normal(size=3), int(r.integers(0, 2)), 1.0)
                 for _ in range(16)]
        for _ in range(20):
            grads, _ = grad(params, batch)
            step(params, grads, opt)
        return params
    a, b = run(), run()
    for x, y in zip(a.arrays(), b.arrays()):
        assert np.array_equal(x, y)


def test_gradient_correctness_many_configs():
    r = rng(100)
    for trial in range(20):
        depth = int(r.integers(1, 4))
        dims = [int(r.integers(1, 7)) for _ in range(depth + 1)]
        dims[-1] = 1
        acts = ["sigmoid"] * depth
        params = init_dense(dims, acts, rng(200 + trial))
        batch = [(r.normal(size=dims[0]), int(r.integers(0, 2)), 1.0)
                 for _ in range(4)]
        assert finite_difference_check(params, batch, eps=1e-5,
                                       seed=trial) < 1e-4


def test_bce_always_finite():
    params = DenseParams([DenseLayer(np.array([[1000.0]]), np.zeros(1),
                                     "sigmoid")])
    batch = [(np.array([100.0]), 0, 1.0), (np.array([-100.0]), 1, 1.0)]
    _, loss = grad(params, batch)
    assert np.isfinite(loss)


def test_checkpoint_roundtrip_byte_identical():
    params = init_dense([3, 4, 1], ["sigmoid", "relu"], rng(42))
    buf1 = io.StringIO()
    nncore.write_dense_checkpoint(params, buf1)
    again = nncore.read_dense_checkpoint(io.StringIO(buf1.getvalue()))
    buf2 = io.StringIO()
    nncore.write_dense_checkpoint(again, buf2)
    assert buf1.getvalue() == buf2.getvalue()
    for a, b in zip(params.arrays(), again.arrays()):
        assert np.array_equal(a, b)
    assert [l.activation for l in again.layers] == ["sigmoid", "relu"]
