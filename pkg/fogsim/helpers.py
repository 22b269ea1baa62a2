"""
This module contains various auxiliary functions which are used throughout the package.
"""

import os.path

from mako.template import Template


def make_template(template, filename=False):
    kwds = dict(
        strict_undefined=True,
        imports=['import numpy'])

    # Creating a template from a filename results in more comprehensible stack traces,
    # so we are taking advantage of this if possible.
    if filename:
        kwds['filename'] = template
        return Template(**kwds)
    else:
        return Template(template, **kwds)


def template_for(filename):
    """
    Returns the Mako template object created from the file
    which has the same name as ``filename`` and the extension ``.mako``.
    Typically used in modules as ``template_for(__file__)``.
    """
    name, _ext = os.path.splitext(os.path.abspath(filename))
    return make_template(name + '.mako', filename=True)


def parse_float_list(text):
    """
    Parses a comma-separated list of numbers (e.g. ``"50,100,150"``) into a tuple of floats.
    Empty items are ignored.
    """
    return tuple(float(item) for item in text.split(',') if item.strip() != '')


def relative_path(path, root):
    """
    Returns ``path`` relative to ``root`` in POSIX notation,
    so that the recorded paths do not depend on the location of the dataset.
    """
    return os.path.relpath(str(path), str(root)).replace(os.sep, '/')
