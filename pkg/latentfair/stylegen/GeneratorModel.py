"""This module implements the style-based generator: a mapping network
Z -> W and a multi-scale synthesis network modulated by one style vector
per scale (AdaIN-style normalization followed by a style-derived scale and
shift).
"""

from collections import OrderedDict

import numpy as np

from ..ndcore import (
    Tensor,
    ContractError,
    MLP,
    Dense,
    weight_tensor,
    broadcast_rows,
    instance_norm,
    slice_cols,
    mul,
    add,
    relu,
)


class StateError(ValueError):
    pass


class StyleStack:
    """One style vector w_i per generator scale i.

    Parameters
    ----------

    styles
      List of 1-D arrays of the same length, one per scale.
    """

    def __init__(self, styles):
        styles = [np.array(w, dtype=float) for w in styles]
        if len(styles) == 0:
            raise ContractError("A StyleStack needs at least one scale")
        if len(set(w.shape for w in styles)) != 1 or styles[0].ndim != 1:
            raise ContractError(
                "All styles of a stack must be vectors of the same length, got %s"
                % [list(w.shape) for w in styles]
            )
        self.styles = styles

    @staticmethod
    def broadcast(w, num_scales):
        """Return the shared-mode stack using ``w`` at every scale."""
        return StyleStack([w] * num_scales)

    @staticmethod
    def from_vector(vector, num_scales, mode="shared"):
        """Inverse of ``StyleStack.vector``."""
        vector = np.asarray(vector, dtype=float)
        if mode == "shared":
            return StyleStack.broadcast(vector, num_scales)
        elif mode == "per-scale":
            return StyleStack(np.split(vector, num_scales))
        raise ValueError("mode must be shared or per-scale, not %s" % mode)

    @property
    def num_scales(self):
        return len(self.styles)

    @property
    def w_dim(self):
        return self.styles[0].shape[0]

    @property
    def is_shared(self):
        return all(np.array_equal(w, self.styles[0]) for w in self.styles[1:])

    def vector(self, mode="shared"):
        """Return the single w (shared mode) or the concatenation of all
        the w_i (per-scale mode)."""
        if mode == "shared":
            if not self.is_shared:
                raise ContractError("This stack has distinct styles per scale")
            return self.styles[0].copy()
        elif mode == "per-scale":
            return np.concatenate(self.styles)
        raise ValueError("mode must be shared or per-scale, not %s" % mode)

    def to_array(self):
        return np.array(self.styles)

    def __eq__(self, other):
        return isinstance(other, StyleStack) and np.array_equal(
            self.to_array(), other.to_array())

    def __repr__(self):
        return "StyleStack(%d x %d%s)" % (
            self.num_scales, self.w_dim, ", shared" if self.is_shared else "")


class GeneratorModel:
    """Style-based generator.

    Parameters
    ----------

    rng
      ndcore Rng for the initialization.

    z_dim, w_dim, num_scales, x_dim, channels
      Latent width (16), style width (32), number of scales L (2), output
      width (64), synthesis width (32).

    w_bar_decay
      Decay of the exponential moving average tracking the mean style
      during training. ``None`` tracks the exact arithmetic mean instead.

    Notes
    -----

    The mapping network is a 2-layer MLP z_dim -> w_dim -> w_dim. The
    synthesis starts from a learned constant activation; block i normalizes
    the activation per vector (eps=1e-6), modulates it with
    ``gamma_i * h + beta_i`` where (gamma_i, beta_i) is an affine function of
    w_i only, then applies a dense layer with relu. A final dense head
    outputs the feature vector.
    """

    def __init__(self, rng, z_dim=16, w_dim=32, num_scales=2, x_dim=64,
                 channels=32, w_bar_decay=0.995, eps=1e-6):
        self.z_dim = z_dim
        self.w_dim = w_dim
        self.num_scales = num_scales
        self.x_dim = x_dim
        self.channels = channels
        self.w_bar_decay = w_bar_decay
        self.eps = eps
        self.mapping = MLP([z_dim, w_dim, w_dim], rng=rng, name="mapping")
        self.const = rng.normal(channels)
        self.affines = []
        self.denses = []
        for i in range(num_scales):
            affine = Dense(w_dim, 2 * channels, rng=rng, name="block%d.affine" % i)
            affine.b[:channels] = 1.0
            self.affines.append(affine)
            self.denses.append(
                Dense(channels, channels, rng=rng, name="block%d.dense" % i))
        self.head = Dense(channels, x_dim, rng=rng, name="head")
        self.w_bar = None
        self.w_bar_count = 0
        self.training = False

    def parameters(self):
        params = OrderedDict(self.mapping.parameters())
        params["synthesis.const"] = self.const
        for affine, dense in zip(self.affines, self.denses):
            params.update(affine.parameters())
            params.update(dense.parameters())
        params.update(self.head.parameters())
        return params

    def map_tensor(self, z, tape=None):
        return self.mapping(z, tape=tape)

    def map(self, z):
        """Return the style vector(s) of latent code(s) z (a vector or rows
        of a matrix). In training mode, updates the running mean style."""
        z = np.asarray(z, dtype=float)
        w = self.mapping(Tensor(z)).data
        if self.training:
            self.update_mean_style(np.atleast_2d(w))
        return w

    def update_mean_style(self, ws):
        """Update w_bar with the rows of ``ws``."""
        ws = np.atleast_2d(ws)
        if self.w_bar_decay is None:
            for w in ws:
                if self.w_bar is None:
                    self.w_bar = np.zeros(self.w_dim)
                self.w_bar_count += 1
                self.w_bar = self.w_bar + (w - self.w_bar) / self.w_bar_count
        else:
            batch_mean = ws.mean(axis=0)
            if self.w_bar is None:
                self.w_bar = batch_mean
            else:
                self.w_bar = (
                    self.w_bar_decay * self.w_bar
                    + (1 - self.w_bar_decay) * batch_mean
                )
            self.w_bar_count += len(ws)

    def synthesize(self, ws, tape=None, identity_scales=()):
        """Return the output tensor for a list of per-scale style tensors
        (each of shape (n, w_dim)).

        Modulation of the scales in ``identity_scales`` is frozen to
        gamma=1, beta=0.
        """
        if len(ws) != self.num_scales:
            raise ContractError(
                "The generator has %d scales, got %d styles"
                % (self.num_scales, len(ws))
            )
        n_rows = ws[0].data.shape[0]
        const = weight_tensor(self.const, "synthesis.const", tape)
        h = broadcast_rows(const, n_rows)
        for i, (affine, dense) in enumerate(zip(self.affines, self.denses)):
            h = instance_norm(h, eps=self.eps)
            if i not in identity_scales:
                style = affine(ws[i], tape=tape)
                gamma = slice_cols(style, 0, self.channels)
                beta = slice_cols(style, self.channels, 2 * self.channels)
                h = add(mul(gamma, h), beta)
            else:
                # Parameters stay on the tape (with zero gradient).
                affine(ws[i], tape=tape)
            h = relu(dense(h, tape=tape))
        return self.head(h, tape=tape)

    def generate(self, styles, identity_scales=()):
        """Return the 64-dim feature vector generated from a StyleStack."""
        if styles.num_scales != self.num_scales:
            raise ContractError(
                "The generator has %d scales, the stack has %d"
                % (self.num_scales, styles.num_scales)
            )
        ws = [Tensor(w[None, :]) for w in styles.styles]
        return self.synthesize(ws, identity_scales=identity_scales).data[0]

    def generate_many(self, styles_array, identity_scales=()):
        """Return the (n, x_dim) outputs for an (n, L, w_dim) array of
        stacks."""
        styles_array = np.asarray(styles_array, dtype=float)
        if len(styles_array) == 0:
            return np.zeros((0, self.x_dim))
        ws = [Tensor(styles_array[:, i, :]) for i in range(self.num_scales)]
        return self.synthesize(ws, identity_scales=identity_scales).data

    def truncate(self, w, psi):
        """Return ``w_bar + psi * (w - w_bar)``."""
        if self.w_bar is None:
            raise StateError("The mean style is empty: train or map in training "
                             "mode first.")
        if not 0 <= psi <= 1:
            raise ValueError("psi must be in [0, 1], got %s" % psi)
        return self.w_bar + psi * (np.asarray(w, dtype=float) - self.w_bar)

    def config(self):
        return OrderedDict([
            ("z_dim", self.z_dim), ("w_dim", self.w_dim),
            ("num_scales", self.num_scales), ("x_dim", self.x_dim),
            ("channels", self.channels), ("w_bar_decay", self.w_bar_decay),
        ])

    def __repr__(self):
        return "GeneratorModel(z=%d, w=%d, L=%d, x=%d)" % (
            self.z_dim, self.w_dim, self.num_scales, self.x_dim)


def map_latent(z, model):
    """Return the style vector of latent code z."""
    return model.map(z)


def generate(styles, model):
    """Return the feature vector generated from the StyleStack."""
    return model.generate(styles)


def truncate(w, psi, model):
    """Interpolate w towards the model's mean style."""
    return model.truncate(w, psi)


def sample_styles(n, model, rng, shared_styles=True):
    """Return an (n, L, w_dim) array of style stacks of z ~ N(0, I).

    In shared mode one z per sample is mapped and broadcast to every
    scale, else each scale gets its own z.
    """
    if n == 0:
        return np.zeros((0, model.num_scales, model.w_dim))
    if shared_styles:
        w = model.map(rng.normal((n, model.z_dim)))
        return np.repeat(w[:, None, :], model.num_scales, axis=1)
    z = rng.normal((n * model.num_scales, model.z_dim))
    return model.map(z).reshape(n, model.num_scales, model.w_dim)


def sample_fakes(n, model, rng, shared_styles=True):
    """Return a list of (StyleStack, feature vector) for n random samples."""
    styles = sample_styles(n, model, rng, shared_styles=shared_styles)
    features = model.generate_many(styles)
    return [(StyleStack(list(s)), x) for s, x in zip(styles, features)]
