"""Binary MLP classifiers over feature vectors (image space) or style
vectors (latent space)."""

from collections import OrderedDict

import numpy as np

from ..ndcore import Tensor, MLP, ContractError, sigmoid

TARGETS = ("disease", "subgroup")
SPACES = ("image", "latent")
STYLE_MODES = ("shared", "per-scale")


class ClassifierModel:
    """Single-logit MLP classifier.

    Parameters
    ----------

    target
      "disease" (1 = AMD) or "subgroup" (1 = AfricanAmerican).

    space
      "image" for 64-dim features, "latent" for style vectors.

    input_width
      Width of the inputs (64, or 32 * number of scales / 32 in latent
      space).

    rng
      ndcore Rng for the weight initialization.

    hidden
      Widths of the hidden layers.

    style_mode
      Latent space only: "shared" (input is the single w) or "per-scale"
      (input is the concatenation of all the w_i).
    """

    def __init__(self, target, space, input_width, rng=None, hidden=(32, 32),
                 style_mode=None):
        if target not in TARGETS:
            raise ValueError("target must be one of %s, not %s" % (TARGETS, target))
        if space not in SPACES:
            raise ValueError("space must be one of %s, not %s" % (SPACES, space))
        if space == "latent":
            style_mode = "shared" if style_mode is None else style_mode
            if style_mode not in STYLE_MODES:
                raise ValueError("style_mode must be one of %s, not %s"
                                 % (STYLE_MODES, style_mode))
        self.target = target
        self.space = space
        self.input_width = int(input_width)
        self.hidden = tuple(hidden)
        self.style_mode = style_mode
        self.mlp = MLP([self.input_width] + list(hidden) + [1], rng=rng,
                       name="classifier")
        self.validation_accuracy = None
        self.training_config = None

    @property
    def name(self):
        return "%s_%s" % (self.space, self.target)

    def parameters(self):
        return self.mlp.parameters()

    def _check_width(self, x):
        width = x.shape[-1]
        if width != self.input_width:
            raise ContractError(
                "Classifier %s expects inputs of width %d, got %d"
                % (self.name, self.input_width, width)
            )

    def forward(self, x, tape=None):
        """Return the (n, 1) logit tensor of the input tensor x.

        With ``tape=None`` the weights are constants, so gradients can
        still flow to an input leaf of another tape."""
        self._check_width(x.data)
        return self.mlp(x, tape=tape)

    def logits(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        self._check_width(x)
        return self.mlp(Tensor(x)).data[:, 0]

    def predict_proba(self, x):
        """Return the probabilities of class 1 for the rows of x."""
        return sigmoid(Tensor(self.logits(x))).data

    def predict(self, x):
        return (self.predict_proba(x) >= 0.5).astype(int)

    def accuracy(self, x, labels):
        return float(np.mean(self.predict(x) == np.asarray(labels)))

    def meta(self):
        return OrderedDict([
            ("target", self.target),
            ("space", self.space),
            ("input_width", self.input_width),
            ("hidden", list(self.hidden)),
            ("style_mode", self.style_mode),
            ("validation_accuracy", self.validation_accuracy),
            ("training_config", self.training_config),
        ])

    def __repr__(self):
        return "ClassifierModel(%s, %s, width %d)" % (
            self.target, self.space, self.input_width)
