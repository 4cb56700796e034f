"""SGD and Adam parameter updates."""

import numpy as np

from .Tensor import NonFiniteError, DimensionError


class OptimState:
    """State of an optimizer over a dict of named parameter arrays.

    Parameters
    ----------

    kind
      Either "sgd" or "adam".

    learning_rate
      Positive step size.

    beta1, beta2, eps
      Adam constants (standard bias-corrected Adam).
    """

    def __init__(self, kind="adam", learning_rate=1e-3, beta1=0.9, beta2=0.999,
                 eps=1e-8):
        if kind not in ("sgd", "adam"):
            raise ValueError("Optimizer kind must be sgd or adam, not %s" % kind)
        if not learning_rate > 0:
            raise ValueError("The learning rate must be positive, got %s"
                             % learning_rate)
        self.kind = kind
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.first_moments = {}
        self.second_moments = {}
        self.step_count = 0

    def step(self, params, grads):
        """Update the arrays of ``params`` in place, return ``params``.

        ``grads`` maps (a subset of) the parameter names to gradients;
        parameters without a gradient are left unchanged.
        """
        for name, grad in grads.items():
            if name not in params:
                continue
            if not np.all(np.isfinite(grad)):
                raise NonFiniteError(
                    "Non-finite gradient for parameter %s at optimizer step %d"
                    % (name, self.step_count + 1)
                )
            if np.shape(grad) != params[name].shape:
                raise DimensionError(
                    "Gradient of %s has shape %s, parameter has shape %s"
                    % (name, list(np.shape(grad)), list(params[name].shape))
                )
        self.step_count += 1
        for name, grad in grads.items():
            if name not in params:
                continue
            if self.kind == "sgd":
                params[name] -= self.learning_rate * grad
                continue
            if name not in self.first_moments:
                self.first_moments[name] = np.zeros_like(grad)
                self.second_moments[name] = np.zeros_like(grad)
            m = self.first_moments[name]
            v = self.second_moments[name]
            m *= self.beta1
            m += (1 - self.beta1) * grad
            v *= self.beta2
            v += (1 - self.beta2) * grad ** 2
            m_hat = m / (1 - self.beta1 ** self.step_count)
            v_hat = v / (1 - self.beta2 ** self.step_count)
            params[name] -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)
        return params

    def __repr__(self):
        return "OptimState(%s, lr=%s, step=%d)" % (
            self.kind, self.learning_rate, self.step_count)


def step(opt, params, grads):
    """Apply one optimizer step (see ``OptimState.step``)."""
    return opt.step(params, grads)
