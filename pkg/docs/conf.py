# -*- coding: utf-8 -*-
#
# openAssembly documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import sys, os

# The package is documented from the source tree; the launchers live in bin/.
sys.path.append(os.path.abspath('..'))
sys.path.append(os.path.abspath('../bin'))

from openassembly import oaVersion

# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.autodoc']

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'openAssembly'
copyright = u'2024, the openAssembly contributors'

# The short X.Y version, and the full version including patch level.
version = '.'.join(str(v) for v in oaVersion.VERSION[:2])
release = '.'.join(str(v) for v in oaVersion.VERSION)

exclude_patterns = ['build']

pygments_style = 'sphinx'

# -- Options for HTML output ---------------------------------------------------

html_theme = 'default'

htmlhelp_basename = 'openAssemblydoc'

# -- Options for LaTeX output --------------------------------------------------

latex_elements = {
}

latex_documents = [
  ('index', 'openAssembly.tex', u'openAssembly Documentation',
   u'openAssembly contributors', 'manual'),
]

# -- Options for manual page output --------------------------------------------

man_pages = [
    ('index', 'openassembly', u'openAssembly Documentation',
     [u'openAssembly contributors'], 1)
]
