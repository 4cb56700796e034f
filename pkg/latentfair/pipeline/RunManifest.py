"""Provenance record of a pipeline run."""

import json
import os
from collections import OrderedDict

import flametree

from ..tools import file_digest
from ..version import __version__

MANIFEST_FILENAME = "manifest.json"


class RunManifest:
    """Config snapshot, artifact digests and stage outcomes of a run.

    Parameters
    ----------

    config
      The config dict of the run.

    artifacts
      {relative file path: sha256 digest}.

    stages
      {stage name: {"outcome": "done"|"resumed"|"failed", "seconds": ...}}.

    version
      Version of latentfair which produced the run.
    """

    def __init__(self, config, artifacts=None, stages=None, version=__version__,
                 data=None):
        self.config = config
        self.artifacts = OrderedDict() if artifacts is None else artifacts
        self.stages = OrderedDict() if stages is None else stages
        self.version = version
        self.data = OrderedDict() if data is None else data

    def record_stage(self, name, outcome, seconds=None, **details):
        entry = OrderedDict([("outcome", outcome), ("seconds", seconds)])
        entry.update(details)
        self.stages[name] = entry

    def record_artifacts(self, directory):
        """List every file of the directory (except the manifest) with its
        digest."""
        self.artifacts = OrderedDict(
            (path, file_digest(os.path.join(directory, path)))
            for path in list_files(directory)
        )

    def verify(self, directory):
        """Return the list of problems: files listed but missing or with a
        different digest, and files present but not listed."""
        problems = []
        present = set(list_files(directory))
        for path, digest in self.artifacts.items():
            if path not in present:
                problems.append("%s is missing" % path)
            elif file_digest(os.path.join(directory, path)) != digest:
                problems.append("%s has changed" % path)
        for path in sorted(present - set(self.artifacts)):
            problems.append("%s is not listed" % path)
        return problems

    def completed_stages(self):
        return [name for name, entry in self.stages.items()
                if entry["outcome"] in ("done", "resumed")]

    def to_dict(self, timestamps=True):
        """Return the manifest as a dict (without stage durations if
        ``timestamps`` is False, to compare runs)."""
        stages = OrderedDict()
        for name, entry in self.stages.items():
            entry = OrderedDict(entry)
            if not timestamps:
                entry.pop("seconds", None)
            stages[name] = entry
        return OrderedDict([
            ("version", self.version),
            ("config", self.config),
            ("artifacts", self.artifacts),
            ("stages", stages),
            ("data", self.data),
        ])

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @staticmethod
    def from_dict(dct):
        return RunManifest(
            dct["config"], artifacts=OrderedDict(sorted(dct["artifacts"].items())),
            stages=dct["stages"], version=dct["version"], data=dct.get("data"),
        )

    @staticmethod
    def from_file(filepath):
        with open(filepath, "r") as f:
            return RunManifest.from_dict(json.load(f))

    def __repr__(self):
        return "RunManifest(%d artifacts, stages %s)" % (
            len(self.artifacts), self.completed_stages())


def list_files(directory):
    """Return the sorted relative paths of the files under the directory,
    the manifest excluded."""
    root = flametree.file_tree(directory)
    paths = [
        os.path.relpath(f._path, directory)
        for f in root._all_files
    ]
    return sorted(p for p in paths if p != MANIFEST_FILENAME)
