"""Single-photon spectra of a force-loaded optomechanical cavity."""

from ._optoforce import *  # noqa: F401,F403
from ._optoforce import __doc__  # noqa: F401

__version__ = "0.1.0"
