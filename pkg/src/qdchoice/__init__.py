"""Quantum delayed-choice experiment with white noise."""
from ._accel import BACKEND
from .circuit import ExperimentSetting, JointDistribution

__version__ = "0.1.0"

__all__ = ["BACKEND", "ExperimentSetting", "JointDistribution", "__version__"]
