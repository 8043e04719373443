"""Convolutional operators on finite abelian groups."""

try:
    from ._abelconv import *  # noqa: F401,F403
    from ._abelconv import __doc__  # noqa: F401
except ImportError:  # build tree: extension sits next to the package
    from _abelconv import *  # noqa: F401,F403

__version__ = "0.1.0"
