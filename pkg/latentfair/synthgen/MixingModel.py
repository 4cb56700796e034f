"""Mixing of the 10 generative factors into 64-dim observations."""

import numpy as np


class UnsupportedModeError(ValueError):
    pass


class MixingModel:
    """Map factor vectors f to observations ``x = M f + b + noise``.

    Parameters
    ----------

    M
      (64, 10) matrix with orthonormal columns.

    b
      64-dim offset.

    noise_scale
      Standard deviation of the observation noise (sigma_epsilon).

    nonlinear
      If True, observations are ``M f + b + 0.25 tanh(M f) + noise``, and
      factors can no longer be recovered exactly.
    """

    def __init__(self, M, b, noise_scale=0.05, nonlinear=False):
        self.M = np.asarray(M, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.noise_scale = float(noise_scale)
        self.nonlinear = bool(nonlinear)
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be >= 0, got %s" % noise_scale)
        if self.M.shape[0] != self.b.shape[0]:
            raise ValueError("M has shape %s but b has shape %s"
                             % (list(self.M.shape), list(self.b.shape)))

    @staticmethod
    def random(rng, dim=64, n_factors=10, noise_scale=0.05, nonlinear=False,
               offset_scale=0.5):
        """Return a mixing model with M from the QR decomposition of a
        seeded Gaussian matrix and b a scaled Gaussian vector."""
        gaussian = rng.normal((dim, n_factors))
        Q, R = np.linalg.qr(gaussian)
        # Sign convention making the decomposition unique.
        Q = Q * np.sign(np.diag(R))
        b = offset_scale * rng.normal(dim)
        return MixingModel(Q, b, noise_scale=noise_scale, nonlinear=nonlinear)

    @property
    def dim(self):
        return self.M.shape[0]

    @property
    def n_factors(self):
        return self.M.shape[1]

    def orthonormality_error(self):
        """Return max |M^T M - I|."""
        return np.abs(self.M.T @ self.M - np.eye(self.n_factors)).max()

    def mix(self, factors, rng=None):
        """Return observations for factor vectors (one per row).

        Without ``rng`` no observation noise is added.
        """
        factors = np.atleast_2d(factors)
        signal = factors @ self.M.T
        x = signal + self.b
        if self.nonlinear:
            x = x + 0.25 * np.tanh(signal)
        if rng is not None and self.noise_scale > 0:
            x = x + self.noise_scale * rng.normal(x.shape)
        return x

    def recover_factors(self, x):
        """Return the least-squares factor estimate ``M^T (x - b)``."""
        if self.nonlinear:
            raise UnsupportedModeError(
                "Factors cannot be recovered from a nonlinear mixing model."
            )
        return (np.asarray(x, dtype=float) - self.b) @ self.M

    def __repr__(self):
        return "MixingModel(%dx%d, noise=%s%s)" % (
            self.dim, self.n_factors, self.noise_scale,
            ", nonlinear" if self.nonlinear else "")


def recover_factors(x, mixing):
    """Return the 10-dim factor estimate of ``x`` (rows of ``x`` if 2-D)."""
    return mixing.recover_factors(x)
