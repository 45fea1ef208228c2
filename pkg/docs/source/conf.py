# Sphinx configuration for the schottky documentation.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys

sys.path.insert(0, os.path.abspath("../.."))

from schottky.version import __version__  # noqa: E402

# -- Project -----------------------------------------------------------------

project = "schottky"
copyright = "2026, schottky developers"
author = "schottky developers"
release = __version__

# -- General -----------------------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosectionlabel",
    "sphinx.ext.mathjax",
    "sphinx_autodoc_typehints",
]

autodoc_member_order = "bysource"
exclude_patterns = []

# -- HTML --------------------------------------------------------------------

html_theme = "sphinx_rtd_theme"

html_show_copyright = False
html_show_sphinx = False
html_show_sourcelink = False

rst_prolog = """
.. include:: <s5defs.txt>

"""
