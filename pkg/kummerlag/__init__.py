"""Jacobian fibrations on Kummer lattices and lagrangian surfaces in abelian fourfolds."""

import logging

from kummerlag.kummerlag import Kummer
from kummerlag.scenarios.scenarios import scenarios

__all__ = ["Kummer", "scenarios"]

logging.getLogger(__name__).addHandler(logging.NullHandler())

try:
    from ._version import __version__
except ImportError:
    __version__ = "unknown"
