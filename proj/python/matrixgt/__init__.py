"""Synthetic vehicle ground truth: scene simulation, box annotation and KITTI-style evaluation."""

from ._matrixgt import *  # noqa: F401,F403
from ._matrixgt import __doc__  # noqa: F401

__version__ = "0.1.0"
