"""Gradient traversal of style vectors and decoding of the endpoints.

The traversal minimizes, over the style vector w (the single shared w, or
the concatenation of the w_i in per-scale mode)::

    f(w) = BCE(C_d(w), target) + subgroup_weight * BCE(C_a(w), s0)
    objective(w) = f(w) + anchor_weight * ||w - w0||^2

where C_d and C_a are the latent disease and subgroup classifiers and s0
the starter's subgroup. Each iteration takes a gradient step on f and
applies the anchor term exactly (proximal step)::

    w <- (w - eta * grad f(w) + 2 eta lambda w0) / (1 + 2 eta lambda)

which is plain gradient descent on the objective when lambda = 0.

With the "generator" metric, grad f is replaced by V S^-2 V^T grad f where
J = U S V^T is the Jacobian of the decoded features with respect to w
(singular values below ``rcond * s_max`` dropped), rescaled to the norm of
grad f. Steps then follow the directions of least change of the decoded
features instead of the directions the generator amplifies most.
"""

import numpy as np

from ..ndcore import (
    Tape,
    Tensor,
    ContractError,
    NonFiniteError,
    add,
    scale,
    total,
    mul,
    slice_cols,
    concat_cols,
    bce_with_logits,
    sigmoid,
)
from ..stylegen import StyleStack
from ..synthgen import FeatureRecord
from .Trajectory import Trajectory, TrajectoryState
from .TraversalConfig import TraversalConfig


class TrajectoryRejectedError(ValueError):
    """Raised when decoding a trajectory which did not converge."""

    def __init__(self, message, outcome=None):
        ValueError.__init__(self, message)
        self.outcome = outcome


def _classifier_input(w, clf, mode, num_scales):
    """Return the input tensor of a latent classifier for the traversed w."""
    if mode == "shared":
        if clf.style_mode == "per-scale":
            return concat_cols([w] * num_scales)
        return w
    if clf.style_mode != "per-scale":
        raise ContractError(
            "Per-scale traversal needs per-scale latent classifiers, %s is %s"
            % (clf.name, clf.style_mode)
        )
    return w


def _classifier_terms(w, subgroup_target, cfg, disease_clf, subgroup_clf,
                      num_scales):
    """Return (f, grad f, p_disease, p_subgroup) at the flat vector w."""
    tape = Tape()
    w_leaf = tape.leaf(np.asarray(w, dtype=float)[None, :], name="w")
    disease_logit = disease_clf.forward(
        _classifier_input(w_leaf, disease_clf, cfg.mode, num_scales))
    subgroup_logit = subgroup_clf.forward(
        _classifier_input(w_leaf, subgroup_clf, cfg.mode, num_scales))
    loss = add(
        total(bce_with_logits(disease_logit, cfg.target_label)),
        scale(total(bce_with_logits(subgroup_logit, subgroup_target)),
              cfg.subgroup_weight),
    )
    grad = tape.backward(loss)["w"][0]
    p_disease = sigmoid(Tensor(disease_logit.data)).data.item()
    p_subgroup = sigmoid(Tensor(subgroup_logit.data)).data.item()
    return loss.item(), grad, p_disease, p_subgroup


def traversal_objective(w, w0, subgroup_target, cfg, disease_clf, subgroup_clf,
                        num_scales=2):
    """Return (value, gradient) of the full traversal objective at w."""
    w, w0 = np.asarray(w, dtype=float), np.asarray(w0, dtype=float)
    value, grad, _, _ = _classifier_terms(
        w, subgroup_target, cfg, disease_clf, subgroup_clf, num_scales)
    drift = w - w0
    return (
        value + cfg.anchor_weight * float(drift @ drift),
        grad + 2 * cfg.anchor_weight * drift,
    )


def backtracking_step_size(w0, subgroup_target, cfg, disease_clf, subgroup_clf,
                           num_scales=2, initial=None, shrink=0.5,
                           armijo=1e-4, max_halvings=40):
    """Return a step size satisfying the Armijo sufficient-decrease
    condition at w0, starting from ``initial`` (default ``cfg.step_size``)
    and halving it."""
    step_size = cfg.step_size if initial is None else initial
    value, grad = traversal_objective(
        w0, w0, subgroup_target, cfg, disease_clf, subgroup_clf, num_scales)
    squared_norm = float(grad @ grad)
    for _ in range(max_halvings):
        new_value, _ = traversal_objective(
            w0 - step_size * grad, w0, subgroup_target, cfg, disease_clf,
            subgroup_clf, num_scales)
        if new_value <= value - armijo * step_size * squared_norm:
            return step_size
        step_size *= shrink
    return step_size


def generator_jacobian(w, generator, mode="shared"):
    """Return the (x_dim, len(w)) Jacobian of the generated features with
    respect to the traversed vector w, in one batched backward pass."""
    w = np.asarray(w, dtype=float)
    tape = Tape()
    rows = tape.leaf(np.tile(w, (generator.x_dim, 1)), name="w")
    if mode == "shared":
        ws = [rows] * generator.num_scales
    else:
        if len(w) != generator.num_scales * generator.w_dim:
            raise ContractError(
                "A per-scale vector of this generator has %d entries, got %d"
                % (generator.num_scales * generator.w_dim, len(w)))
        ws = [slice_cols(rows, i * generator.w_dim, (i + 1) * generator.w_dim)
              for i in range(generator.num_scales)]
    features = generator.synthesize(ws, tape=tape)
    # Row i of the batch only contributes feature i.
    diagonal = total(mul(features, Tensor(np.eye(generator.x_dim))))
    return tape.backward(diagonal)["w"]


def generator_metric_direction(grad, jacobian, rcond=0.05):
    """Return the gradient preconditioned by the pseudo-inverse of J^T J,
    rescaled to the norm of ``grad``."""
    grad = np.asarray(grad, dtype=float)
    _, singular_values, vt = np.linalg.svd(jacobian, full_matrices=False)
    if singular_values[0] == 0:
        return grad
    keep = singular_values >= rcond * singular_values[0]
    basis = vt[keep].T
    direction = basis @ ((basis.T @ grad) / singular_values[keep] ** 2)
    norm = np.linalg.norm(direction)
    if norm == 0:
        return direction
    return direction * (np.linalg.norm(grad) / norm)


def _to_stack(w, mode, num_scales):
    if mode == "shared":
        return StyleStack.broadcast(w, num_scales)
    return StyleStack.from_vector(w, num_scales, mode="per-scale")


def traverse(w0, cfg=None, disease_clf=None, subgroup_clf=None, subgroup=None,
             starter_id=0, generator=None):
    """Move a starter stack by gradient descent until the disease
    classifier reaches the threshold.

    Parameters
    ----------

    w0
      Starter StyleStack (must be shared in shared mode).

    cfg
      A TraversalConfig.

    disease_clf, subgroup_clf
      Latent-space ClassifierModels.

    subgroup
      Subgroup of the starter ("AA" or "C") kept by the retention term.
      Defaults to the subgroup classifier's decision at w0.

    starter_id
      Identifier recorded in the trajectory.

    generator
      GeneratorModel defining the "generator" metric (required by that
      metric only).

    Returns
    -------

    A Trajectory with one state per iteration (iteration 0 is the
    starter). Its outcome is "converged" if the stop condition was met,
    "diverged" if the objective became non-finite (the last finite state is
    kept), else "max-iters".
    """
    cfg = TraversalConfig() if cfg is None else cfg
    if cfg.metric == "generator" and generator is None:
        raise ContractError("The generator metric needs a generator")
    num_scales = w0.num_scales
    start = w0.vector(cfg.mode)
    w = start.copy()
    if subgroup is None:
        _, _, _, p_subgroup = _classifier_terms(
            w, 1, cfg, disease_clf, subgroup_clf, num_scales)
        subgroup = "AA" if p_subgroup >= 0.5 else "C"
    subgroup_target = 1 if subgroup == "AA" else 0
    step_size, anchor = cfg.step_size, cfg.anchor_weight

    def evaluate(w):
        value, grad, p_disease, p_subgroup = _classifier_terms(
            w, subgroup_target, cfg, disease_clf, subgroup_clf, num_scales)
        drift = w - start
        objective = value + anchor * float(drift @ drift)
        if not np.isfinite(objective):
            raise NonFiniteError("Non-finite traversal objective")
        return grad, p_disease, p_subgroup, objective

    grad, p_disease, p_subgroup, objective = evaluate(w)
    states = [TrajectoryState(0, _to_stack(w, cfg.mode, num_scales),
                              p_disease, p_subgroup, objective)]
    outcome = "converged" if cfg.reached(p_disease) else "max-iters"
    iteration = 0
    while outcome != "converged" and iteration < cfg.max_iterations:
        iteration += 1
        if cfg.metric == "generator":
            grad = generator_metric_direction(
                grad, generator_jacobian(w, generator, cfg.mode), cfg.rcond)
        new_w = (w - step_size * grad + 2 * step_size * anchor * start) / (
            1 + 2 * step_size * anchor)
        try:
            if not np.all(np.isfinite(new_w)):
                raise NonFiniteError("Non-finite style vector")
            grad, p_disease, p_subgroup, objective = evaluate(new_w)
        except NonFiniteError:
            outcome = "diverged"
            break
        w = new_w
        states.append(TrajectoryState(iteration, _to_stack(w, cfg.mode, num_scales),
                                      p_disease, p_subgroup, objective))
        if cfg.reached(p_disease):
            outcome = "converged"
    return Trajectory(starter_id, states, outcome, subgroup=subgroup,
                      target_label=cfg.target_label)


def decode_endpoint(trajectory, generator, record_id=None):
    """Decode the final stack of a converged trajectory into a synthetic
    FeatureRecord (label = the imparted label, subgroup = the starter's).

    The record's ``data`` holds the provenance: starter_id, iterations,
    p_disease, p_subgroup.
    """
    if not trajectory.converged:
        raise TrajectoryRejectedError(
            "Trajectory of starter %s ended with outcome %s and cannot be "
            "decoded" % (trajectory.starter_id, trajectory.outcome),
            outcome=trajectory.outcome,
        )
    final = trajectory.final
    return FeatureRecord(
        id=trajectory.starter_id if record_id is None else record_id,
        subgroup=trajectory.subgroup,
        severity=0,
        label=trajectory.target_label,
        source="synthetic",
        x=generator.generate(final.styles),
        data=dict(
            starter_id=trajectory.starter_id,
            iterations=trajectory.iterations,
            p_disease=final.p_disease,
            p_subgroup=final.p_subgroup,
        ),
    )
