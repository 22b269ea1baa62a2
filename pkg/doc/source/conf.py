# -*- coding: utf-8 -*-
#
# fogsim documentation build configuration file.

import sys, os, os.path
import importlib.util

# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.doctest', 'sphinx.ext.mathjax']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'fogsim'
copyright = '2026, the fogsim developers'

def get_version():
    conf_path = os.path.split(os.path.realpath(__file__))[0]
    setup_path = os.path.join(conf_path, '..', '..', 'setup.py')
    spec = importlib.util.spec_from_file_location('setup', setup_path)
    m = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(m)
    return m.ensure_version_py()

# The short X.Y version and the full version, including alpha/beta/rc tags.
version, release = get_version()

exclude_patterns = []
pygments_style = 'sphinx'

# Warn about all the references that cannot be resolved.
nitpicky = True
nitpick_ignore = [
    ('py:class', 'numpy.ndarray'),
    ('py:class', 'reikna.core.Computation'),
    ]

# -- Options for HTML output ---------------------------------------------------

html_theme = 'alabaster'
html_static_path = []
htmlhelp_basename = 'fogsimdoc'

# -- Options for LaTeX output --------------------------------------------------

latex_documents = [
  ('index', 'fogsim.tex', 'fogsim Documentation', 'the fogsim developers', 'manual'),
]

# -- Options for manual page output --------------------------------------------

man_pages = [
    ('index', 'fogsim', 'fogsim Documentation', ['the fogsim developers'], 1)
]
