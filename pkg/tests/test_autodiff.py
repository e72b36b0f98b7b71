"""Reverse-mode engine: per-op gradients against central differences plus
structural properties of the graph walk."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersat import autodiff as ad
from hypersat.autodiff import Tensor
from hypersat.rng import make_rng


def rand(rng, *shape):
    return rng.standard_normal(shape)


def check_unary(build, shapes, seed, tol=1e-4):
    """FD-check a scalar-valued graph over named parameter arrays."""
    rng = make_rng(seed, 0xAD)
    params = {k: rand(rng, *s) for k, s in shapes.items()}

    def f(ps):
        leaves = {k: Tensor(v) for k, v in ps.items()}
        return float(build(leaves).value)

    leaves = {k: Tensor(v) for k, v in params.items()}
    out = build(leaves)
    ad.backward(out)
    grads = {k: leaves[k].grad for k in params}
    err = ad.finite_diff_check(f, params, grads, step=1e-5, floor=1e-5)
    assert err < tol, f"max rel err {err}"


SEEDS = st.integers(0, 10_000)


@given(SEEDS)
@settings(max_examples=20, deadline=None)
def test_matmul_grad(seed):
    check_unary(
        lambda l: ad.tsum(ad.matmul(l["a"], l["b"])),
        {"a": (3, 4), "b": (4, 2)},
        seed,
    )


@given(SEEDS)
@settings(max_examples=20, deadline=None)
def test_add_sub_scale_hadamard_grad(seed):
    check_unary(
        lambda l: ad.frobenius_sq(
            ad.hadamard(ad.sub(ad.add(l["a"], l["b"]), ad.scale(l["c"], 0.7)), l["c"])
        ),
        {"a": (3, 3), "b": (3, 3), "c": (3, 3)},
        seed,
    )


@given(SEEDS)
@settings(max_examples=20, deadline=None)
def test_transpose_concat_split_grad(seed):
    def build(l):
        top, bot = ad.split_rows(ad.concat_rows(l["a"], ad.transpose(l["b"])), 2)
        return ad.frobenius_sq(ad.matmul(ad.transpose(top), bot))

    check_unary(build, {"a": (2, 3), "b": (3, 2)}, seed)


@given(SEEDS)
@settings(max_examples=20, deadline=None)
def test_reshape_pairs_softmax_grad(seed):
    check_unary(
        lambda l: ad.frobenius_sq(ad.row_softmax(ad.reshape_pairs(l["v"], 3))),
        {"v": (6, 1)},
        seed,
    )


@given(SEEDS)
@settings(max_examples=20, deadline=None)
def test_relu_sigmoid_grad(seed):
    check_unary(
        lambda l: ad.tsum(ad.sigmoid(ad.relu(ad.matmul(l["a"], l["b"])))),
        {"a": (4, 3), "b": (3, 2)},
        seed,
    )


@given(SEEDS)
@settings(max_examples=20, deadline=None)
def test_layer_norm_grad(seed):
    check_unary(
        lambda l: ad.frobenius_sq(
            ad.layer_norm(l["a"], l["gain"], l["bias"])
        ),
        {"a": (4, 5), "gain": (1, 5), "bias": (1, 5)},
        seed,
    )


@given(SEEDS)
@settings(max_examples=10, deadline=None)
def test_sparse_matmul_grad(seed):
    import scipy.sparse as sp

    rng = make_rng(seed, 0xAE)
    dense = rng.standard_normal((4, 4)) * (rng.random((4, 4)) < 0.5)
    s = sp.csr_matrix(dense)
    check_unary(
        lambda l, s=s: ad.frobenius_sq(ad.sparse_matmul(s, l["x"])),
        {"x": (4, 3)},
        seed,
    )


def test_row_softmax_rows_sum_to_one():
    rng = make_rng(5, 0xAF)
    p = ad.row_softmax(Tensor(rng.standard_normal((6, 4)) * 10)).value
    assert np.allclose(p.sum(axis=1), 1.0)
    assert np.all(p > 0)


def test_row_softmax_shift_invariant():
    rng = make_rng(6, 0xAF)
    a = rng.standard_normal((3, 4))
    p1 = ad.row_softmax(Tensor(a)).value
    p2 = ad.row_softmax(Tensor(a + 100.0)).value
    assert np.allclose(p1, p2)


def test_layer_norm_output_statistics():
    rng = make_rng(7, 0xAF)
    a = Tensor(rng.standard_normal((5, 8)) * 3 + 2)
    out = ad.layer_norm(a, Tensor(np.ones((1, 8))), Tensor(np.zeros((1, 8)))).value
    assert np.allclose(out.mean(axis=1), 0.0, atol=1e-12)
    assert np.allclose(out.var(axis=1), 1.0, atol=1e-3)


def test_multi_consumer_accumulation():
    # d/dx of (x @ x^T summed) where x is consumed twice
    x = Tensor(np.array([[1.0, 2.0], [3.0, 4.0]]))
    out = ad.tsum(ad.matmul(x, ad.transpose(x)))
    ad.backward(out)
    assert np.allclose(x.grad, 2.0 * (x.value.sum(axis=0) * np.ones((2, 2))))


def test_diamond_graph_gradient():
    # y = sum((x + x) * x) = sum(2 x^2), dy/dx = 4x
    x = Tensor(np.array([[1.0, -2.0, 3.0]]))
    out = ad.tsum(ad.hadamard(ad.add(x, x), x))
    ad.backward(out)
    assert np.allclose(x.grad, 4.0 * x.value)


def test_backward_requires_scalar():
    x = Tensor(np.ones((2, 2)))
    with pytest.raises(ValueError):
        ad.backward(ad.add(x, x))


def test_shape_mismatch_errors():
    a, b = Tensor(np.ones((2, 2))), Tensor(np.ones((2, 3)))
    with pytest.raises(ValueError):
        ad.add(a, b)
    with pytest.raises(ValueError):
        ad.matmul(b, b)
    with pytest.raises(ValueError):
        ad.split_rows(a, 2)
    with pytest.raises(ValueError):
        ad.reshape_pairs(Tensor(np.ones((3, 1))), 2)


def test_dropout_inference_is_identity():
    rng = make_rng(1, 0xB0)
    a = Tensor(rng.standard_normal((5, 5)))
    out = ad.dropout(a, 0.5, training=False, rng=rng)
    assert np.array_equal(out.value, a.value)


def test_dropout_training_mask_and_scaling():
    rng = make_rng(2, 0xB0)
    a = Tensor(np.ones((200, 200)))
    p = 0.3
    out = ad.dropout(a, p, training=True, rng=rng)
    vals = np.unique(out.value)
    assert set(np.round(vals, 12)) <= {0.0, round(1.0 / (1.0 - p), 12)}
    # survivor fraction near 1-p, mean preserved in expectation
    assert abs((out.value == 0).mean() - p) < 0.02
    assert abs(out.value.mean() - 1.0) < 0.02


def test_dropout_gradient_uses_same_mask():
    rng = make_rng(3, 0xB0)
    a = Tensor(np.ones((10, 10)))
    out = ad.dropout(a, 0.4, training=True, rng=rng)
    ad.backward(ad.tsum(out))
    assert np.array_equal(a.grad, (out.value != 0) / 0.6)


def test_dropout_requires_rng_when_training():
    with pytest.raises(ValueError):
        ad.dropout(Tensor(np.ones((2, 2))), 0.5, training=True, rng=None)
    with pytest.raises(ValueError):
        ad.dropout(Tensor(np.ones((2, 2))), 1.0, training=True, rng=None)


def test_finite_diff_check_flags_wrong_gradient():
    params = {"x": np.array([[2.0]])}

    def f(ps):
        return float((ps["x"] ** 2).sum())

    good = ad.finite_diff_check(f, params, {"x": np.array([[4.0]])})
    bad = ad.finite_diff_check(f, params, {"x": np.array([[3.0]])})
    assert good < 1e-6
    assert bad > 0.2


def test_finite_diff_check_restores_params():
    params = {"x": np.array([[1.0, 2.0]])}
    before = params["x"].copy()
    ad.finite_diff_check(
        lambda ps: float(ps["x"].sum()), params, {"x": np.ones((1, 2))}
    )
    assert np.array_equal(params["x"], before)
