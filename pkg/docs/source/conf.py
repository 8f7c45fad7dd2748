# Configuration file for the Sphinx documentation builder.
#
# For the full list of built-in configuration values, see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

sys.path.insert(0, os.path.abspath(os.path.join("..", "..", "src")))


def setup(app):
    app.add_config_value("releaselevel", "", "env")


PYPROJECT = os.path.join("..", "..", "pyproject.toml")
with open(PYPROJECT, "rb") as f:
    DATA = tomllib.load(f)["project"]
PROJECT_VERSION = DATA["version"]
PROJECT_NAME = DATA["name"]
AUTHORS = ",".join(author["name"] for author in DATA["authors"])

# -- Project information -----------------------------------------------------

project = PROJECT_NAME
release = PROJECT_VERSION
copyright = "2026, grangersets developers"
author = AUTHORS

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosectionlabel",
    "sphinx.ext.doctest",
    "sphinx.ext.viewcode",
    "sphinx.ext.todo",
    "sphinx.ext.napoleon",
    "sphinx.ext.autosummary",
    "sphinx.ext.graphviz",
    "sphinx.ext.mathjax",
    "sphinx.ext.intersphinx",
    "sphinx.ext.ifconfig",
    "myst_parser",
]

doctest_global_setup = """
import numpy as np
import grangersets
"""
todo_include_todos = True
intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "pandas": ("https://pandas.pydata.org/docs/", None),
}
templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
source_suffix = {
    ".rst": "restructuredtext",
    ".md": "markdown",
}
myst_enable_extensions = ["dollarmath"]
rst_prolog = """
.. ifconfig:: releaselevel in ('alpha', 'beta', 'rc')

   .. warning::

        This stuff is only included in the built docs for unstable versions.

"""
autosectionlabel_prefix_document = True
autodoc_member_order = "bysource"
numfig = True

# -- Options for HTML output -------------------------------------------------

html_theme = "furo"
html_static_path = []
html_copy_source = True
html_show_sourcelink = True
