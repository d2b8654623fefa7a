"""
Configuration file for Sphinx.
"""
import os
import sys
from importlib import import_module

sys.path.insert(0, os.path.abspath(".."))

project = "groupoid-cocycles"
copyright = "2026, Nikolas Ovaskainen"
author = "Nikolas Ovaskainen"

release = import_module("groupoid_cocycles").__version__  # type: ignore

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.doctest",
    "sphinx_autodoc_typehints",
    "sphinx_rtd_theme",
]
autodoc_member_order = "bysource"

source_suffix = {
    ".rst": "restructuredtext",
}
master_doc = "index"
templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]
