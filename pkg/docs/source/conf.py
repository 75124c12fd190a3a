# Sphinx configuration for dartfx-lengthvolume.

import sys
from datetime import UTC, datetime
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent.parent / "src"))

from dartfx.lengthvolume.__about__ import __version__

project = "dartfx-lengthvolume"
copyright = f"2024-{datetime.now(tz=UTC).year}, Pascal Heus (Data Artifex)"
author = "Pascal Heus"
release = version = __version__

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
    "sphinx.ext.intersphinx",
    "sphinx_copybutton",
    "myst_parser",
]

# Docstrings are short reST/Google style; pydantic fields document themselves through Field(description=...)
napoleon_google_docstring = True
napoleon_numpy_docstring = False
napoleon_attr_annotations = True

autodoc_default_options = {
    "members": True,
    "member-order": "bysource",
    "exclude-members": "model_config, model_fields, model_computed_fields",
}
autodoc_typehints = "description"
autodoc_typehints_description_target = "documented"

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "pydantic": ("https://docs.pydantic.dev/latest/", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "networkx": ("https://networkx.org/documentation/stable/", None),
}

myst_enable_extensions = ["colon_fence", "deflist", "dollarmath"]

templates_path: list[str] = ["_templates"]
exclude_patterns: list[str] = []

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]
html_theme_options = {"navigation_depth": 3, "collapse_navigation": False}
html_context = {
    "display_github": True,
    "github_user": "DataArtifex",
    "github_repo": "lengthvolume-toolkit",
    "github_version": "main",
    "conf_py_path": "/docs/source/",
}
