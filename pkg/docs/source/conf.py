# Configuration file for the Sphinx documentation builder.
#
# This file only contains a selection of the most common options. For a full
# list see the documentation:
# http://www.sphinx-doc.org/en/master/config

import kummerlag

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
]

autodoc_typehints = "description"

templates_path = ["_templates"]

source_suffix = ".rst"

master_doc = "index"

project = "kummerlag"
copyright = "2026, kummerlag developers"
author = "kummerlag developers"

version = release = kummerlag.__version__

language = "en"

exclude_patterns = []

pygments_style = "sphinx"

todo_include_todos = False

html_theme = "alabaster"

html_theme_options = {
    "logo_name": "kummerlag",
    "fixed_sidebar": True,
}

html_sidebars = {
    "**": [
        "about.html",
        "navigation.html",
        "relations.html",  # needs 'show_related': True theme option to display
        "searchbox.html",
    ],
}

htmlhelp_basename = "kummerlagdoc"

man_pages = [(master_doc, "kummerlag", "kummerlag Documentation", [author], 1)]
