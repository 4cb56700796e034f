# Sphinx configuration of the latentfair documentation.

import os
import sys

sys.path.insert(0, os.path.abspath(".."))

version_info = {}
with open(os.path.join("..", "latentfair", "version.py")) as fp:
    exec(fp.read(), version_info)

project = "latentfair"
version = release = version_info["__version__"]

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.todo",
    "sphinx.ext.viewcode",
    "numpydoc",
]
numpydoc_show_class_members = False

source_suffix = [".rst"]
master_doc = "index"
exclude_patterns = ["_build"]

html_theme = "sphinx_rtd_theme"
