"""Dense tensors and a reverse-mode automatic differentiation tape.

Tensors are rank-1 or rank-2 arrays of 64-bit floats. Every operation of
this module checks its output for NaN/Inf and raises ``NonFiniteError``
rather than letting it propagate.

An operation is recorded on a ``Tape`` when at least one of its inputs
requires gradients. Inputs requiring gradients are either parameters
(``tape.parameter``) or marked input leaves (``tape.leaf``), so the
gradient of a loss can be obtained for model weights and for the model
input alike:

>>> tape = Tape()
>>> w = tape.leaf([1.0, 2.0], name="w")
>>> loss = l2_norm_squared(w)
>>> tape.backward(loss)["w"]
array([2., 4.])
"""

from collections import OrderedDict

import numpy as np


class DimensionError(ValueError):
    pass


class NonFiniteError(ValueError):
    pass


class ContractError(ValueError):
    pass


def check_finite(data, where):
    if not np.all(np.isfinite(data)):
        raise NonFiniteError("Non-finite value produced by %s." % where)


class Tensor:
    """A rank-1 or rank-2 array of 64-bit floats.

    Parameters
    ----------

    data
      Anything numpy can turn into a float array of rank 1 or 2.

    requires_grad
      Only tensors created by a Tape (or produced by taped operations) should
      have this set, use ``Tape.leaf`` and ``Tape.parameter`` for that.

    name
      Name under which the gradient of this tensor is reported by
      ``Tape.backward``.
    """

    def __init__(self, data, requires_grad=False, name=None):
        data = np.asarray(data, dtype=np.float64)
        if data.ndim not in (1, 2):
            raise DimensionError(
                "Tensors have rank 1 or 2, got shape %s" % list(data.shape)
            )
        check_finite(data, "tensor creation" if name is None else name)
        self.data = data
        self.requires_grad = requires_grad
        self.name = name
        self.tape = None
        self.node = None

    @property
    def shape(self):
        return list(self.data.shape)

    def item(self):
        if self.data.size != 1:
            raise ContractError("item() requires a scalar, got shape %s" % self.shape)
        return float(self.data.ravel()[0])

    def numpy(self):
        return np.array(self.data)

    def __add__(self, other):
        return add(self, as_tensor(other))

    def __sub__(self, other):
        return sub(self, as_tensor(other))

    def __mul__(self, other):
        if np.isscalar(other):
            return scale(self, other)
        return mul(self, as_tensor(other))

    def __matmul__(self, other):
        return matmul(self, as_tensor(other))

    def __repr__(self):
        return "Tensor(shape=%s%s)" % (
            self.shape,
            ", requires_grad" if self.requires_grad else "",
        )


def as_tensor(value):
    return value if isinstance(value, Tensor) else Tensor(value)


class TapeNode:
    """One recorded operation (or leaf) of a tape."""

    def __init__(self, op, inputs, vjp=None, name=None):
        self.op = op
        self.inputs = inputs
        self.vjp = vjp
        self.name = name

    def __repr__(self):
        return "TapeNode(%s, inputs=%s)" % (self.op, self.inputs)


class Tape:
    """Append-only record of the operations of one forward pass.

    Node inputs always reference earlier nodes, so the list of nodes is in
    topological order by construction.
    """

    def __init__(self):
        self.nodes = []
        self.parameters = OrderedDict()
        self.marked_inputs = OrderedDict()

    def _add_leaf(self, data, name, registry, kind):
        if name in self.parameters or name in self.marked_inputs:
            raise ContractError("A leaf named %s is already on the tape" % name)
        tensor = Tensor(data, requires_grad=True, name=name)
        tensor.tape = self
        tensor.node = len(self.nodes)
        leaf_node = TapeNode(kind, (), name=name)
        leaf_node.shape = tensor.data.shape
        self.nodes.append(leaf_node)
        registry[name] = tensor.node
        return tensor

    def parameter(self, data, name):
        """Return a tensor for a model weight, gradients reported under name."""
        return self._add_leaf(data, name, self.parameters, "parameter")

    def leaf(self, data, name="input"):
        """Return an input tensor whose gradient is wanted (e.g. a style
        vector being traversed)."""
        return self._add_leaf(data, name, self.marked_inputs, "input")

    def record(self, op, inputs, output, vjp):
        output.requires_grad = True
        output.tape = self
        output.node = len(self.nodes)
        input_nodes = tuple(
            t.node if (t.requires_grad and t.tape is self) else None for t in inputs
        )
        self.nodes.append(TapeNode(op, input_nodes, vjp=vjp))
        return output

    def backward(self, loss):
        """Return {name: gradient} for every parameter and marked input.

        Parameters and inputs the loss does not depend on get a zero
        gradient.
        """
        if loss.data.size != 1:
            raise ContractError(
                "backward() needs a scalar loss, got shape %s" % loss.shape
            )
        if loss.tape is not self:
            raise ContractError("The loss was not computed on this tape")
        grads = {loss.node: np.ones_like(loss.data)}
        for index in range(loss.node, -1, -1):
            node = self.nodes[index]
            if (index not in grads) or (node.vjp is None):
                continue
            input_grads = node.vjp(grads[index])
            for input_node, grad in zip(node.inputs, input_grads):
                if input_node is None or grad is None:
                    continue
                if input_node in grads:
                    grads[input_node] = grads[input_node] + grad
                else:
                    grads[input_node] = grad
        result = OrderedDict()
        for registry in (self.parameters, self.marked_inputs):
            for name, node in registry.items():
                if node in grads:
                    result[name] = grads[node]
                else:
                    result[name] = np.zeros(self.nodes[node].shape)
                check_finite(result[name], "gradient of %s" % name)
        return result

    def __len__(self):
        return len(self.nodes)


def backward(tape, loss):
    """Return the gradient map of the scalar ``loss`` recorded on ``tape``."""
    return tape.backward(loss)


def _taped(op, inputs, out, vjp):
    """Wrap ``out`` in a Tensor, recording it when an input needs grads."""
    check_finite(out, op)
    result = Tensor(out)
    tapes = set(t.tape for t in inputs if t.requires_grad)
    if len(tapes) > 1:
        raise ContractError("%s: inputs come from different tapes" % op)
    if tapes:
        tapes.pop().record(op, inputs, result, vjp)
    return result


def _same_shape(op, a, b):
    if a.data.shape != b.data.shape:
        raise DimensionError(
            "%s: shapes %s and %s do not match" % (op, a.shape, b.shape)
        )


def _is_row_bias(a, b):
    return (
        a.data.ndim == 2 and b.data.ndim == 1 and a.data.shape[1] == b.data.shape[0]
    )


def matmul(a, b):
    """Matrix product. Rank-1 operands are treated as a row (left) or a
    column (right) and the corresponding dimension is dropped again."""
    a2 = a.data if a.data.ndim == 2 else a.data[None, :]
    b2 = b.data if b.data.ndim == 2 else b.data[:, None]
    if a2.shape[1] != b2.shape[0]:
        raise DimensionError(
            "matmul: cannot multiply shapes %s and %s" % (a.shape, b.shape)
        )
    if a.data.ndim == 1 and b.data.ndim == 1:
        raise DimensionError(
            "matmul: the product of shapes %s and %s is not a tensor"
            % (a.shape, b.shape)
        )
    out = a2 @ b2
    out_shape = out.shape
    if a.data.ndim == 1:
        out = out[0]
    elif b.data.ndim == 1:
        out = out[:, 0]

    def vjp(g):
        g2 = g.reshape(out_shape)
        ga = (g2 @ b2.T).reshape(a.data.shape) if a.requires_grad else None
        gb = (a2.T @ g2).reshape(b.data.shape) if b.requires_grad else None
        return ga, gb

    return _taped("matmul", (a, b), out, vjp)


def add(a, b):
    """Elementwise sum. ``b`` may be a rank-1 bias added to every row."""
    if _is_row_bias(a, b):

        def vjp(g):
            return g, g.sum(axis=0)

    else:
        _same_shape("add", a, b)

        def vjp(g):
            return g, g

    return _taped("add", (a, b), a.data + b.data, vjp)


def sub(a, b):
    """Elementwise difference. ``b`` may be a rank-1 bias."""
    if _is_row_bias(a, b):

        def vjp(g):
            return g, -g.sum(axis=0)

    else:
        _same_shape("sub", a, b)

        def vjp(g):
            return g, -g

    return _taped("sub", (a, b), a.data - b.data, vjp)


def mul(a, b):
    """Elementwise (Hadamard) product of same-shape tensors."""
    _same_shape("mul", a, b)

    def vjp(g):
        return g * b.data, g * a.data

    return _taped("mul", (a, b), a.data * b.data, vjp)


def scale(a, factor):
    """Multiply by a constant."""
    factor = float(factor)
    return _taped("scale", (a,), a.data * factor, lambda g: (g * factor,))


def transpose(a):
    if a.data.ndim != 2:
        raise DimensionError("transpose needs a rank-2 tensor, got %s" % a.shape)
    return _taped("transpose", (a,), a.data.T, lambda g: (g.T,))


def broadcast_rows(a, n_rows):
    """Repeat a (k,) or (1, k) tensor into an (n_rows, k) tensor."""
    if a.data.ndim == 2 and a.data.shape[0] != 1:
        raise DimensionError(
            "broadcast_rows needs shape (k,) or (1, k), got %s" % a.shape
        )
    row = a.data.reshape(-1)
    out = np.tile(row, (n_rows, 1))
    return _taped(
        "broadcast_rows",
        (a,),
        out,
        lambda g: (g.sum(axis=0).reshape(a.data.shape),),
    )


def concat_cols(tensors):
    """Concatenate rank-2 tensors (same number of rows) along columns."""
    tensors = tuple(tensors)
    if len(set(t.data.shape[0] for t in tensors)) != 1 or any(
        t.data.ndim != 2 for t in tensors
    ):
        raise DimensionError(
            "concat_cols: incompatible shapes %s" % [t.shape for t in tensors]
        )
    bounds = np.cumsum([0] + [t.data.shape[1] for t in tensors])

    def vjp(g):
        return tuple(g[:, start:stop] for start, stop in zip(bounds[:-1], bounds[1:]))

    out = np.concatenate([t.data for t in tensors], axis=1)
    return _taped("concat_cols", tensors, out, vjp)


def slice_cols(a, start, stop):
    """Return columns start..stop-1 of a rank-2 tensor."""
    if a.data.ndim != 2 or not (0 <= start < stop <= a.data.shape[1]):
        raise DimensionError(
            "slice_cols: cannot take columns %d:%d of shape %s" % (start, stop, a.shape)
        )

    def vjp(g):
        full = np.zeros_like(a.data)
        full[:, start:stop] = g
        return (full,)

    return _taped("slice_cols", (a,), a.data[:, start:stop], vjp)


def sigmoid(a):
    out = np.empty_like(a.data)
    positive = a.data >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-a.data[positive]))
    exp_x = np.exp(a.data[~positive])
    out[~positive] = exp_x / (1.0 + exp_x)
    return _taped("sigmoid", (a,), out, lambda g: (g * out * (1.0 - out),))


def relu(a):
    mask = a.data > 0
    return _taped("relu", (a,), a.data * mask, lambda g: (g * mask,))


def tanh(a):
    out = np.tanh(a.data)
    return _taped("tanh", (a,), out, lambda g: (g * (1.0 - out ** 2),))


def bce_with_logits(logits, targets, soft=False):
    """Elementwise binary cross-entropy, in the stable logit form
    ``max(x, 0) - x*t + log(1 + exp(-|x|))``.

    ``targets`` is a constant array of the logits' shape with values in
    {0, 1} (or in [0, 1] when ``soft`` is True).
    """
    targets = np.broadcast_to(
        np.asarray(targets, dtype=np.float64), logits.data.shape
    ).copy()
    if soft:
        valid = np.all((targets >= 0) & (targets <= 1))
    else:
        valid = np.all((targets == 0) | (targets == 1))
    if not valid:
        raise ValueError(
            "BCE targets must be in %s, got values %s"
            % ("[0, 1]" if soft else "{0, 1}", np.unique(targets)[:5])
        )
    x = logits.data
    out = np.maximum(x, 0) - x * targets + np.log1p(np.exp(-np.abs(x)))
    probabilities = sigmoid(Tensor(x)).data
    return _taped(
        "bce_with_logits", (logits,), out, lambda g: (g * (probabilities - targets),)
    )


def mean(a):
    """Mean of all elements, as a (1,) tensor."""
    n = a.data.size
    return _taped(
        "mean",
        (a,),
        np.array([a.data.mean()]),
        lambda g: (np.full(a.data.shape, g.ravel()[0] / n),),
    )


def total(a):
    """Sum of all elements, as a (1,) tensor."""
    return _taped(
        "sum",
        (a,),
        np.array([a.data.sum()]),
        lambda g: (np.full(a.data.shape, g.ravel()[0]),),
    )


def l2_norm_squared(a):
    """Sum of squared elements, as a (1,) tensor."""
    return _taped(
        "l2_norm_squared",
        (a,),
        np.array([np.sum(a.data ** 2)]),
        lambda g: (2 * g.ravel()[0] * a.data,),
    )


def instance_norm(a, eps=1e-6):
    """Normalize each row to zero mean and unit variance.

    A rank-1 tensor is normalized as a single row.
    """
    x = a.data if a.data.ndim == 2 else a.data[None, :]
    centered = x - x.mean(axis=1, keepdims=True)
    std = np.sqrt((centered ** 2).mean(axis=1, keepdims=True) + eps)
    normalized = centered / std

    def vjp(g):
        g2 = g.reshape(x.shape)
        grad = (
            g2
            - g2.mean(axis=1, keepdims=True)
            - normalized * (g2 * normalized).mean(axis=1, keepdims=True)
        ) / std
        return (grad.reshape(a.data.shape),)

    return _taped("instance_norm", (a,), normalized.reshape(a.data.shape), vjp)
