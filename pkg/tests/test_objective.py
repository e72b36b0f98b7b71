"""Relaxed weighted-unsatisfaction loss and the antisymmetry penalty."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersat import autodiff as ad
from hypersat.objective import (
    LossBreakdown,
    compile_clauses,
    shared_loss,
    task_loss,
    task_loss_grad,
    task_loss_value,
    total_loss,
)
from hypersat.rng import make_rng
from hypersat.wcnf import (
    Clause,
    WcnfInstance,
    assign_random_weights,
    evaluate,
    generate_random_3sat,
)


def rand_instance(seed, n=8, m=25):
    return assign_random_weights(
        generate_random_3sat(n, m, seed=seed), seed=seed
    )


def naive_task_loss(instance, y):
    total = 0.0
    for cl in instance.clauses:
        prod = 1.0
        for lit in cl.literals:
            v = y[abs(lit) - 1]
            prod *= (1.0 - v) if lit > 0 else v
        total += cl.weight * prod
    return total


@given(st.integers(0, 5_000))
@settings(max_examples=50, deadline=None)
def test_matches_naive_reference(seed):
    inst = rand_instance(seed)
    y = make_rng(seed, 0xC0).random(inst.num_vars)
    assert abs(task_loss(inst, y) - naive_task_loss(inst, y)) < 1e-12


@given(
    st.integers(0, 5_000),
    st.lists(st.integers(0, 1), min_size=8, max_size=8),
)
@settings(max_examples=100, deadline=None)
def test_binary_inputs_give_exact_unsat_weight(seed, bits):
    inst = rand_instance(seed)
    y = np.array(bits, dtype=np.float64)
    loss = task_loss(inst, y)
    assert loss == evaluate(inst, np.array(bits)).unsat_weight


@given(st.integers(0, 5_000))
@settings(max_examples=30, deadline=None)
def test_loss_bounded_by_total_weight(seed):
    inst = rand_instance(seed)
    y = make_rng(seed, 0xC1).random(inst.num_vars)
    loss = task_loss(inst, y)
    assert 0.0 <= loss <= inst.total_weight()


def test_mixed_arity_clauses():
    inst = WcnfInstance(
        3, (Clause((1,), 2), Clause((-1, 2), 3), Clause((1, -2, 3), 5))
    )
    y = np.array([0.5, 0.25, 0.8])
    expected = (
        2 * 0.5 + 3 * (0.5 * 0.75) + 5 * (0.5 * 0.25 * 0.2)
    )
    assert abs(task_loss(inst, y) - expected) < 1e-12


def test_affine_in_each_coordinate():
    # the loss is multilinear: fixing all but one coordinate gives a line
    inst = rand_instance(17)
    rng = make_rng(17, 0xC2)
    y = rng.random(inst.num_vars)
    for i in range(inst.num_vars):
        vals = []
        for t in (0.0, 0.5, 1.0):
            z = y.copy()
            z[i] = t
            vals.append(task_loss(inst, z))
        assert abs(vals[1] - 0.5 * (vals[0] + vals[2])) < 1e-10


@given(st.integers(0, 5_000))
@settings(max_examples=30, deadline=None)
def test_gradient_matches_finite_differences(seed):
    inst = rand_instance(seed)
    compiled = compile_clauses(inst)
    y = make_rng(seed, 0xC3).random(inst.num_vars)
    grad = task_loss_grad(y, compiled)
    step = 1e-6
    for i in range(inst.num_vars):
        yp, ym = y.copy(), y.copy()
        yp[i] += step
        ym[i] -= step
        fd = (task_loss_value(yp, compiled) - task_loss_value(ym, compiled)) / (
            2 * step
        )
        assert abs(fd - grad[i]) < 1e-6 * max(1.0, abs(grad[i]))


def test_gradient_exact_at_binary_corners():
    # multilinearity means the analytic gradient is exact even at 0/1
    inst = rand_instance(23)
    compiled = compile_clauses(inst)
    y = (make_rng(23, 0xC4).random(inst.num_vars) < 0.5).astype(np.float64)
    grad = task_loss_grad(y, compiled)
    for i in range(inst.num_vars):
        y0, y1 = y.copy(), y.copy()
        y0[i], y1[i] = 0.0, 1.0
        slope = task_loss_value(y1, compiled) - task_loss_value(y0, compiled)
        assert abs(slope - grad[i]) < 1e-12


def test_tensor_path_matches_array_path_and_backprop():
    inst = rand_instance(31)
    compiled = compile_clauses(inst)
    y = make_rng(31, 0xC5).random((inst.num_vars, 1))
    yt = ad.Tensor(y)
    loss = task_loss(compiled, yt)
    assert abs(float(loss.value) - task_loss_value(y, compiled)) < 1e-12
    ad.backward(loss)
    assert np.allclose(
        yt.grad.reshape(-1), task_loss_grad(y, compiled)
    )


def test_task_loss_rejects_wrong_length():
    inst = rand_instance(1)
    with pytest.raises(ValueError):
        task_loss(inst, np.ones(inst.num_vars + 1))


def test_shared_loss_values_and_gradient():
    a = np.array([[1.0, -2.0], [0.5, 0.0]])
    b = np.array([[-1.0, 2.0], [0.5, 1.0]])
    assert shared_loss(a, b) == pytest.approx(((a + b) ** 2).sum())
    assert shared_loss(a, -a) == 0.0
    ta, tb = ad.Tensor(a), ad.Tensor(b)
    out = shared_loss(ta, tb)
    ad.backward(out)
    assert np.allclose(ta.grad, 2 * (a + b))
    assert np.allclose(tb.grad, 2 * (a + b))
    with pytest.raises(ValueError):
        shared_loss(a, np.ones((3, 2)))


def test_total_loss_and_breakdown():
    assert total_loss(10.0, 5.0, lam=2e-3) == pytest.approx(10.01)
    lb = LossBreakdown(task=10.0, shared=5.0, lam=2e-3)
    assert lb.total == pytest.approx(10.01)
    with pytest.raises(ValueError):
        total_loss(1.0, 1.0, lam=-0.1)
