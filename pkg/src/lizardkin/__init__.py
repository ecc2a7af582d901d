"""Planar closed-chain linkage kinematics for a four-legged lizard robot.

Modules: :mod:`~lizardkin.core` (types, mobility, loop residuals),
:mod:`~lizardkin.fivebar`, :mod:`~lizardkin.fourbar`,
:mod:`~lizardkin.synthesis`, :mod:`~lizardkin.robot`, :mod:`~lizardkin.gait`,
:mod:`~lizardkin.io` and the :mod:`~lizardkin.cli` entry point.
"""
from .core import JointCounts, JointState, LinkSet, LoopId, loop_residual, mobility
from .errors import KinematicsError

__version__ = "0.1.0"

__all__ = [
    "JointCounts",
    "JointState",
    "LinkSet",
    "LoopId",
    "KinematicsError",
    "loop_residual",
    "mobility",
]
