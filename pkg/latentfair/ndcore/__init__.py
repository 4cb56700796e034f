"""Minimal deterministic numerical engine: tensors, tape-based reverse-mode
differentiation, optimizers and seeded random streams."""

from .Tensor import (
    Tensor,
    Tape,
    TapeNode,
    DimensionError,
    NonFiniteError,
    ContractError,
    backward,
    matmul,
    add,
    sub,
    mul,
    scale,
    transpose,
    broadcast_rows,
    concat_cols,
    slice_cols,
    sigmoid,
    relu,
    tanh,
    bce_with_logits,
    mean,
    total,
    l2_norm_squared,
    instance_norm,
)
from .Optimizer import OptimState, step
from .Rng import Rng, rng_draw
from .Dense import Dense, MLP, set_parameters, weight_tensor
