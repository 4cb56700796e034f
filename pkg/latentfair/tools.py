"""Miscellaneous useful functions.

In particular, methods for converting to and from cell names, e.g.
("AA", 1) <-> "AA-1".
"""

import hashlib

import numpy as np
from fuzzywuzzy import process
from proglog import MuteProgressBarLogger, TqdmProgressBarLogger

SUBGROUPS = ("C", "AA")

SUBGROUP_NAMES = {"C": "Caucasian", "AA": "AfricanAmerican"}


def subgroup_code(name):
    """Convert Caucasian->C, AfricanAmerican->AA. Codes pass through."""
    if name in SUBGROUPS:
        return name
    for code, full_name in SUBGROUP_NAMES.items():
        if name == full_name:
            return code
    raise ValueError(
        "%s is not a valid subgroup. Did you mean one of %s ?"
        % (name, did_you_mean(name, list(SUBGROUPS) + list(SUBGROUP_NAMES.values())))
    )


def cell_to_name(cell):
    """Convert ("AA", 1)->"AA-1", ("C", 0)->"C-0"."""
    subgroup, label = cell
    return "%s-%d" % (subgroup_code(subgroup), int(label))


def name_to_cell(name):
    """Convert "AA-1"->("AA", 1)."""
    try:
        subgroup, label = name.rsplit("-", 1)
        label = int(label)
    except ValueError:
        raise ValueError("%s is not a valid cell name (e.g. 'AA-1')." % name)
    if label not in (0, 1):
        raise ValueError("Cell %s: label must be 0 or 1." % name)
    return subgroup_code(subgroup), label


def all_cells():
    """Return [("C", 0), ("C", 1), ("AA", 0), ("AA", 1)]."""
    return [(subgroup, label) for subgroup in SUBGROUPS for label in (0, 1)]


def file_digest(path, algorithm="sha256"):
    """Return the hex digest of the file's content."""
    digest = hashlib.new(algorithm)
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def as_float_list(array):
    """Return a flat list of python floats (for JSON documents)."""
    return [float(v) for v in np.asarray(array, dtype=float).ravel()]


def human_duration(seconds):
    """Return e.g. "850ms", "12.3s", "4min 05s"."""
    if seconds < 1:
        return "%dms" % np.round(1000 * seconds)
    elif seconds < 60:
        return "%.1fs" % seconds
    else:
        return "%dmin %02ds" % divmod(int(np.round(seconds)), 60)


def did_you_mean(name, other_names, limit=5, min_score=50):
    if isinstance(name, (list, tuple)):
        return {
            n: did_you_mean(n, other_names, limit=limit, min_score=min_score)
            for n in name
        }
    results = process.extract(name, list(other_names), limit=limit)
    return [e for (e, score) in results if score >= min_score]


def resolve_logger(logger, bars=None):
    """Return a proglog logger: None -> silent, 'bar' -> tqdm progress
    bars (optionally restricted to ``bars``), a logger passes through."""
    if logger is None:
        return MuteProgressBarLogger()
    elif logger == "bar":
        if bars is None:
            return TqdmProgressBarLogger()
        return TqdmProgressBarLogger(bars=bars)
    return logger
