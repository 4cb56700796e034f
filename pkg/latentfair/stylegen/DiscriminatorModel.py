"""Real/fake discriminator of the style generator."""

import numpy as np

from ..ndcore import (
    Tensor,
    MLP,
    weight_tensor,
    matmul,
    mul,
    add,
    relu,
    transpose,
    broadcast_rows,
    l2_norm_squared,
    scale,
)


class DiscriminatorModel:
    """MLP x_dim -> hidden -> 1 producing a real/fake logit.

    The forward pass is written out layer by layer (rather than calling the
    MLP) so that the same parameter tensors can be used for several
    batches on one tape, and so that the R1 penalty can use the closed-form
    input gradient of the relu network.
    """

    def __init__(self, rng, x_dim=64, hidden=32):
        self.x_dim = x_dim
        self.hidden = hidden
        self.mlp = MLP([x_dim, hidden, 1], rng=rng, name="discriminator")

    def parameters(self):
        return self.mlp.parameters()

    def tensors(self, tape=None):
        """Return the weights as (W1, b1, W2, b2) tensors, on the tape if
        one is given."""
        return tuple(
            weight_tensor(array, name, tape)
            for name, array in self.parameters().items()
        )

    def forward(self, x, tensors=None):
        """Return the (n, 1) logits of the rows of x."""
        W1, b1, W2, b2 = self.tensors() if tensors is None else tensors
        x = x if isinstance(x, Tensor) else Tensor(np.atleast_2d(x))
        return add(matmul(relu(add(matmul(x, W1), b1)), W2), b2)

    def logits(self, x):
        """Return the logits of the rows of x as a flat array."""
        return self.forward(np.atleast_2d(x)).data[:, 0]

    def r1_penalty(self, x_real, tensors, weight=1.0):
        """Return ``weight / 2 * mean_i ||d logit / d x_i||^2``.

        For ``logit = relu(x W1 + b1) W2 + b2`` the input gradient of row i
        is ``(mask_i * W2^T) W1^T`` where mask_i is the relu pattern of the
        row (constant almost everywhere).
        """
        W1, b1, W2, _ = tensors
        x_real = np.atleast_2d(x_real)
        n = x_real.shape[0]
        mask = Tensor((x_real @ W1.data + b1.data > 0).astype(float))
        grad_x = matmul(mul(mask, broadcast_rows(transpose(W2), n)), transpose(W1))
        return scale(l2_norm_squared(grad_x), weight / (2.0 * n))

    def __repr__(self):
        return "DiscriminatorModel(%d->%d->1)" % (self.x_dim, self.hidden)
