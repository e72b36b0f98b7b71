"""Unsupervised hypergraph neural network solver for Weighted MaxSAT."""

from .wcnf import (
    Clause,
    WcnfInstance,
    WcnfParseError,
    assign_random_weights,
    evaluate,
    generate_random_3sat,
    parse_cnf,
    parse_wcnf,
    write_wcnf,
)
from .hypergraph import (
    LiteralHypergraph,
    NormalizedOperator,
    apply_operator,
    build_literal_hypergraph,
    build_variable_hypergraph,
    normalized_operator,
    q_tilde,
)
from .model import ModelConfig, ForwardOutput, forward, init_params
from .objective import LossBreakdown, shared_loss, task_loss, total_loss
from .oracle import OracleResult, exhaustive_optimum, local_search
from .solver import SolveConfig, SolveResult, sample_assignments, solve, train

__all__ = [
    "Clause",
    "WcnfInstance",
    "WcnfParseError",
    "assign_random_weights",
    "evaluate",
    "generate_random_3sat",
    "parse_cnf",
    "parse_wcnf",
    "write_wcnf",
    "LiteralHypergraph",
    "NormalizedOperator",
    "apply_operator",
    "build_literal_hypergraph",
    "build_variable_hypergraph",
    "normalized_operator",
    "q_tilde",
    "ModelConfig",
    "ForwardOutput",
    "forward",
    "init_params",
    "LossBreakdown",
    "shared_loss",
    "task_loss",
    "total_loss",
    "OracleResult",
    "exhaustive_optimum",
    "local_search",
    "SolveConfig",
    "SolveResult",
    "sample_assignments",
    "solve",
    "train",
]
