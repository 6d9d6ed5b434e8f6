"""Heralded hybrid linear amplifier cloning machine.

Thin python package around the compiled extension; see the project README
for the CLI and file formats.
"""

from ._hcm import *  # noqa: F401,F403
from ._hcm import __version__  # noqa: F401
