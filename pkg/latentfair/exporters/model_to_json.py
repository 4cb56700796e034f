"""Export models to "lfw1" JSON weight documents."""

import json
from collections import OrderedDict

import numpy as np

from ..stylegen import GeneratorModel, DiscriminatorModel
from ..classify import ClassifierModel
from ..synthgen import MixingModel
from ..tools import as_float_list

WEIGHTS_FORMAT = "lfw1"


def _layer(name, array):
    array = np.asarray(array, dtype=float)
    shape = [1, array.shape[0]] if array.ndim == 1 else list(array.shape)
    return OrderedDict([("name", name), ("shape", shape),
                        ("data", as_float_list(array))])


def model_to_dict(model):
    """Return the weights document of a generator, discriminator,
    classifier or mixing model."""
    if isinstance(model, GeneratorModel):
        kind = "generator"
        params = model.parameters()
        meta = OrderedDict([
            ("config", model.config()),
            ("w_bar", None if model.w_bar is None else as_float_list(model.w_bar)),
            ("w_bar_count", model.w_bar_count),
        ])
    elif isinstance(model, DiscriminatorModel):
        kind = "discriminator"
        params = model.parameters()
        meta = OrderedDict([("config", OrderedDict([
            ("x_dim", model.x_dim), ("hidden", model.hidden)]))])
    elif isinstance(model, ClassifierModel):
        kind = "classifier"
        params = model.parameters()
        meta = model.meta()
    elif isinstance(model, MixingModel):
        kind = "mixing"
        params = OrderedDict([("M", model.M), ("b", model.b)])
        meta = OrderedDict([("noise_scale", model.noise_scale),
                            ("nonlinear", model.nonlinear)])
    else:
        raise ValueError("Cannot export objects of type %s" % type(model))
    return OrderedDict([
        ("format", WEIGHTS_FORMAT),
        ("kind", kind),
        ("layers", [_layer(name, array) for name, array in params.items()]),
        ("meta", meta),
    ])


def model_to_json(model, filepath=None):
    """Return the JSON text of the model's weights document (keys sorted,
    so equal models give identical texts), and write it to ``filepath`` if
    provided."""
    text = json.dumps(model_to_dict(model), sort_keys=True, indent=1)
    if filepath is not None:
        with open(filepath, "w") as f:
            f.write(text)
    return text
