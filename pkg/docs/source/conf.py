# Sphinx configuration for the coblab documentation.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import pathlib
import sys

import toml

ROOT = pathlib.Path(__file__).resolve().parents[2]

# Autodoc imports the package from the src layout without installing it.
sys.path.insert(0, str(ROOT / "src"))

# -- Project information -----------------------------------------------------

poetry = toml.load(ROOT / "pyproject.toml")["tool"]["poetry"]

project = poetry["name"]
author = poetry["authors"][0].split(" <")[0]
copyright = f"2026, {author}"
release = poetry["version"]

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autosectionlabel",
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
    "sphinx_autodoc_typehints",
    "sphinxcontrib.autodoc_pydantic",
]

# Cross references read as :ref:`page:Section Title`.
autosectionlabel_prefix_document = True

autodoc_member_order = "bysource"
autodoc_default_options = {"members": True}

# Google style docstrings only.
napoleon_numpy_docstring = False

autodoc_pydantic_model_show_config_summary = False
autodoc_pydantic_model_show_validator_summary = False
autodoc_pydantic_field_list_validators = False

templates_path = ["_templates"]
exclude_patterns = []

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
