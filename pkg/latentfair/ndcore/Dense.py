"""Dense layers and multi-layer perceptrons on top of the tape.

Weights use a scaled uniform initialization with gain sqrt(2 / fan_in):
``W ~ U(-a, a)`` with ``a = sqrt(3) * sqrt(2 / fan_in)`` so that the weights'
standard deviation is sqrt(2 / fan_in). Biases start at zero.
"""

from collections import OrderedDict

import numpy as np

from .Tensor import Tensor, matmul, add, relu, tanh, sigmoid

ACTIVATIONS = {"relu": relu, "tanh": tanh, "sigmoid": sigmoid}


def weight_tensor(array, name, tape=None):
    """Return a taped parameter if a tape is given, else a constant."""
    if tape is None:
        return Tensor(array)
    return tape.parameter(array, name)


class Dense:
    """Affine layer ``x @ W + b``.

    Parameters
    ----------

    fan_in, fan_out
      Input and output widths.

    rng
      ndcore Rng used for the weight initialization (None for zero weights).

    name
      Prefix of the parameter names (e.g. "mapping.0" -> "mapping.0.W").
    """

    def __init__(self, fan_in, fan_out, rng=None, name="dense"):
        self.fan_in = fan_in
        self.fan_out = fan_out
        self.name = name
        if rng is None:
            self.W = np.zeros((fan_in, fan_out))
        else:
            bound = np.sqrt(3.0) * np.sqrt(2.0 / fan_in)
            self.W = (2 * rng.uniform((fan_in, fan_out)) - 1) * bound
        self.b = np.zeros(fan_out)

    def parameters(self):
        return OrderedDict([(self.name + ".W", self.W), (self.name + ".b", self.b)])

    def __call__(self, x, tape=None):
        W = weight_tensor(self.W, self.name + ".W", tape)
        b = weight_tensor(self.b, self.name + ".b", tape)
        return add(matmul(x, W), b)

    def __repr__(self):
        return "Dense(%s, %d->%d)" % (self.name, self.fan_in, self.fan_out)


class MLP:
    """Stack of Dense layers with an activation between them (none after
    the last layer, so the output is e.g. a logit).

    Parameters
    ----------

    widths
      List of widths, e.g. [64, 32, 32, 1].

    rng
      ndcore Rng for the initialization.

    name
      Prefix of the parameter names.

    activation
      Name of the hidden activation ("relu", "tanh" or "sigmoid").
    """

    def __init__(self, widths, rng=None, name="mlp", activation="relu"):
        self.widths = list(widths)
        self.name = name
        self.activation = activation
        self.layers = [
            Dense(fan_in, fan_out, rng=rng, name="%s.%d" % (name, i))
            for i, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:]))
        ]

    def parameters(self):
        params = OrderedDict()
        for layer in self.layers:
            params.update(layer.parameters())
        return params

    def __call__(self, x, tape=None):
        activation = ACTIVATIONS[self.activation]
        for i, layer in enumerate(self.layers):
            x = layer(x, tape=tape)
            if i < len(self.layers) - 1:
                x = activation(x)
        return x

    def __repr__(self):
        return "MLP(%s, %s)" % (self.name, "->".join(str(w) for w in self.widths))


def set_parameters(params, values):
    """Copy ``values`` (name -> array) into the arrays of ``params`` in
    place, reshaping e.g. (1, n) documents to (n,) parameters."""
    missing = [name for name in params if name not in values]
    if missing:
        raise ValueError("Missing values for parameters %s" % missing)
    for name, array in params.items():
        value = np.asarray(values[name], dtype=np.float64)
        if value.size != array.size:
            raise ValueError(
                "Parameter %s has shape %s, got %s values"
                % (name, list(array.shape), value.size)
            )
        array[...] = value.reshape(array.shape)
