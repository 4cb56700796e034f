"""Read models from "lfw1" JSON weight documents."""

import json

import numpy as np

from ..ndcore import Rng, set_parameters
from ..stylegen import GeneratorModel, DiscriminatorModel
from ..classify import ClassifierModel
from ..synthgen import MixingModel

WEIGHTS_FORMAT = "lfw1"


def _load_document(source):
    if isinstance(source, dict):
        return source
    if source.lstrip().startswith("{"):
        return json.loads(source)
    with open(source, "r") as f:
        return json.load(f)


def _layers(document):
    return {
        layer["name"]: np.array(layer["data"], dtype=float).reshape(layer["shape"])
        for layer in document["layers"]
    }


def model_from_json(source):
    """Return the model described by a weights document.

    Parameters
    ----------

    source
      Path to a JSON file, JSON text, or the already-parsed dict.

    Returns
    -------

    A GeneratorModel, DiscriminatorModel, ClassifierModel or MixingModel
    depending on the document's "kind".
    """
    document = _load_document(source)
    if document.get("format") != WEIGHTS_FORMAT:
        raise ValueError("Unknown weights format %s (expected %s)"
                         % (document.get("format"), WEIGHTS_FORMAT))
    kind, meta, layers = document["kind"], document["meta"], _layers(document)
    if kind == "mixing":
        return MixingModel(layers["M"], layers["b"].ravel(),
                           noise_scale=meta["noise_scale"],
                           nonlinear=meta["nonlinear"])
    if kind == "generator":
        model = GeneratorModel(Rng(0), **meta["config"])
        if meta["w_bar"] is not None:
            model.w_bar = np.array(meta["w_bar"], dtype=float)
        model.w_bar_count = meta["w_bar_count"]
    elif kind == "discriminator":
        model = DiscriminatorModel(Rng(0), **meta["config"])
    elif kind == "classifier":
        model = ClassifierModel(
            meta["target"], meta["space"], meta["input_width"],
            hidden=meta["hidden"], style_mode=meta["style_mode"],
        )
        model.validation_accuracy = meta["validation_accuracy"]
        model.training_config = meta.get("training_config")
    else:
        raise ValueError("Unknown model kind %s" % kind)
    set_parameters(model.parameters(), layers)
    return model


def json_from_file(filepath):
    """Return the parsed content of a JSON file."""
    with open(filepath, "r") as f:
        return json.load(f)
