"""Style stacks of synthetic samples labeled by an image classifier."""

import numpy as np
import pandas as pd

from ..ndcore import ContractError


class LabeledLatentSet:
    """Synthetic style stacks with the soft and hard labels assigned to
    their decoded samples by an image-space classifier.

    Parameters
    ----------

    styles
      (n, L, w_dim) array of style stacks.

    soft
      Probabilities of class 1 given by the image classifier.

    target
      Target of the labeling classifier ("disease" or "subgroup").

    sources
      Names of the models which produced the set (generator, classifier).
    """

    def __init__(self, styles, soft, target, sources=()):
        styles = np.asarray(styles, dtype=float)
        soft = np.asarray(soft, dtype=float).reshape(-1)
        if styles.ndim != 3 or len(styles) != len(soft):
            raise ContractError(
                "Need an (n, L, w) style array and n labels, got %s and %d"
                % (list(styles.shape), len(soft))
            )
        if np.any((soft < 0) | (soft > 1)):
            raise ValueError("Soft labels must be probabilities in [0, 1]")
        self.styles = styles
        self.soft = soft
        self.hard = (soft >= 0.5).astype(int)
        self.target = target
        self.sources = list(sources)

    def __len__(self):
        return len(self.soft)

    @property
    def num_scales(self):
        return self.styles.shape[1]

    def inputs(self, style_mode="shared"):
        """Return the latent classifier inputs: the single w of each stack
        (shared mode, first scale) or the concatenation of its w_i."""
        if style_mode == "shared":
            return self.styles[:, 0, :]
        return self.styles.reshape(len(self.styles), -1)

    def class_counts(self):
        return {0: int(np.sum(self.hard == 0)), 1: int(np.sum(self.hard == 1))}

    def positive_fraction(self):
        return float(self.hard.mean()) if len(self) else 0.0

    def to_dataframe(self):
        """Return a DataFrame with columns soft, hard, w0..w{L*w_dim - 1}."""
        flat = self.styles.reshape(len(self.styles), -1)
        df = pd.DataFrame(flat, columns=["w%d" % i for i in range(flat.shape[1])])
        df.insert(0, "hard", self.hard)
        df.insert(0, "soft", self.soft)
        return df

    @staticmethod
    def from_dataframe(df, num_scales, target, sources=()):
        w_columns = [c for c in df.columns if c.startswith("w")]
        flat = df[w_columns].values.astype(float)
        styles = flat.reshape(len(df), num_scales, len(w_columns) // num_scales)
        return LabeledLatentSet(styles, df["soft"].values, target, sources)

    def __repr__(self):
        return "LabeledLatentSet(%s, %d entries, %s)" % (
            self.target, len(self), self.class_counts())
