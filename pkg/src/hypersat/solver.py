"""Per-instance unsupervised training with Adam and early stopping, and
probabilistic rounding to Boolean assignments.

Training minimizes task + lambda * shared per epoch (dropout on, fresh
mask per epoch).  The best-total-loss parameters are kept; the returned
probabilities come from a final dropout-off forward pass with those
parameters.  Rounding draws k independent Bernoulli assignments from the
probability vector and keeps the one with the least unsatisfied weight
(first drawn wins ties).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from . import objective
from .hypergraph import (
    build_literal_hypergraph,
    build_variable_hypergraph,
    normalized_operator,
)
from .model import ModelConfig, ModelParameters, build_forward, init_params
from .objective import LossBreakdown
from .rng import make_rng
from .wcnf import WcnfInstance, evaluate


@dataclass(frozen=True)
class SolveConfig:
    learning_rate: float = 7e-2
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    max_epochs: int = 300
    early_stop_tolerance: float = 1e-4
    early_stop_patience: int = 50
    early_stop_monitor: str = "total"  # "total" | "task"
    lam: float = 2e-3
    num_samples: int = 5
    seed: int = 0
    mode: str = "literal"  # "literal" | "variable"
    use_transformer: bool = True
    attention_dropout: float = 0.1

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.early_stop_patience < 1:
            raise ValueError("patience must be >= 1")
        if self.num_samples < 1:
            raise ValueError("num_samples must be >= 1")


@dataclass(frozen=True)
class SolveResult:
    assignment: np.ndarray
    sat_weight: int
    unsat_weight: int
    epochs_run: int
    loss_trace: tuple[LossBreakdown, ...]
    probabilities: np.ndarray
    final_loss: LossBreakdown
    config: SolveConfig
    instance_name: str = ""

    def to_dict(self) -> dict:
        return {
            "instance": self.instance_name,
            "unsat_weight": int(self.unsat_weight),
            "sat_weight": int(self.sat_weight),
            "epochs_run": int(self.epochs_run),
            "assignment": [int(v) for v in self.assignment],
            "probabilities": [float(p) for p in self.probabilities],
            "final_loss": {
                "task": self.final_loss.task,
                "shared": self.final_loss.shared,
                "total": self.final_loss.total,
            },
            "loss_trace": [
                {"task": lb.task, "shared": lb.shared, "total": lb.total}
                for lb in self.loss_trace
            ],
            "seed": self.config.seed,
            "mode": self.config.mode,
            "use_transformer": self.config.use_transformer,
            "lambda": self.config.lam,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(
    params: ModelParameters,
    grads: dict,
    state: AdamState,
    t: int,
    config: SolveConfig,
) -> None:
    """In-place bias-corrected Adam update on every learnable tensor."""
    b1, b2 = config.adam_beta1, config.adam_beta2
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            continue
        if g.shape != p.shape:
            raise ValueError(f"gradient shape mismatch for {name}")
        m = state.m.setdefault(name, np.zeros_like(p))
        v = state.v.setdefault(name, np.zeros_like(p))
        m *= b1
        m += (1 - b1) * g
        v *= b2
        v += (1 - b2) * g * g
        mhat = m / (1 - b1**t)
        vhat = v / (1 - b2**t)
        p -= config.learning_rate * mhat / (np.sqrt(vhat) + config.adam_eps)


def _model_config(instance: WcnfInstance, config: SolveConfig) -> ModelConfig:
    return ModelConfig(
        num_vars=instance.num_vars,
        mode=config.mode,
        use_transformer=config.use_transformer,
        attention_dropout=config.attention_dropout,
        seed=config.seed,
    )


def _epoch_losses(ft, compiled, lam) -> tuple[ad.Tensor, LossBreakdown]:
    task_t = objective.task_loss(compiled, ft.y)
    if lam > 0 and ft.penult_pos is not None:
        shared_t = objective.shared_loss(ft.penult_pos, ft.penult_neg)
        total_t = ad.add(task_t, ad.scale(shared_t, lam))
        shared_val = float(shared_t.value)
    else:
        total_t = task_t
        shared_val = 0.0
    return total_t, LossBreakdown(float(task_t.value), shared_val, lam)


def train(
    instance: WcnfInstance, config: SolveConfig
) -> tuple[ModelParameters, np.ndarray, list[LossBreakdown], int, LossBreakdown]:
    """Optimize a fresh model on one instance.

    Returns (best parameters, final probabilities, per-epoch loss trace,
    epochs run, dropout-off loss of the best parameters)."""
    builder = (
        build_literal_hypergraph
        if config.mode == "literal"
        else build_variable_hypergraph
    )
    s = normalized_operator(builder(instance))
    mconfig = _model_config(instance, config)
    params = init_params(mconfig)
    compiled = objective.compile_clauses(instance)
    state = AdamState()
    trace: list[LossBreakdown] = []
    best = float("inf")
    best_params = {k: v.copy() for k, v in params.items()}
    stall = 0
    epochs_run = 0
    for epoch in range(1, config.max_epochs + 1):
        drop_rng = make_rng(config.seed, 0xD0, epoch)
        ft = build_forward(
            s, params, mconfig, training=True, dropout_rng=drop_rng
        )
        total_t, breakdown = _epoch_losses(ft, compiled, config.lam)
        if not np.isfinite(breakdown.total):
            raise FloatingPointError(
                f"non-finite loss at epoch {epoch}: {breakdown}"
            )
        trace.append(breakdown)
        epochs_run = epoch
        monitored = (
            breakdown.total
            if config.early_stop_monitor == "total"
            else breakdown.task
        )
        if best - monitored > config.early_stop_tolerance:
            best = monitored
            best_params = {k: v.copy() for k, v in params.items()}
            stall = 0
        else:
            stall += 1
            if stall >= config.early_stop_patience:
                break
        ad.backward(total_t)
        grads = {name: ft.leaves[name].grad for name in params}
        adam_step(params, grads, state, epoch, config)
    final = build_forward(s, best_params, mconfig, training=False)
    _, final_breakdown = _epoch_losses(final, compiled, config.lam)
    y_final = final.y.value.reshape(-1).copy()
    return best_params, y_final, trace, epochs_run, final_breakdown


def sample_assignments(
    y: np.ndarray, instance: WcnfInstance, k: int = 5, seed: int = 0
) -> tuple[np.ndarray, int]:
    """Best of k Bernoulli roundings of the probability vector."""
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.shape[0] != instance.num_vars:
        raise ValueError("probability vector length mismatch")
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = make_rng(seed, 0x5A)
    best_assignment = None
    best_unsat = None
    for _ in range(k):
        assignment = (rng.random(y.shape[0]) < y).astype(np.int8)
        unsat = evaluate(instance, assignment).unsat_weight
        if best_unsat is None or unsat < best_unsat:
            best_unsat = unsat
            best_assignment = assignment
    return best_assignment, best_unsat


def solve(instance: WcnfInstance, config: SolveConfig) -> SolveResult:
    """Train, round, and report; deterministic for a fixed config."""
    params, y, trace, epochs, final_loss = train(instance, config)
    assignment, _ = sample_assignments(
        y, instance, k=config.num_samples, seed=config.seed
    )
    ev = evaluate(instance, assignment)
    return SolveResult(
        assignment=assignment,
        sat_weight=ev.sat_weight,
        unsat_weight=ev.unsat_weight,
        epochs_run=epochs,
        loss_trace=tuple(trace),
        probabilities=y,
        final_loss=final_loss,
        config=config,
        instance_name=instance.name,
    )
