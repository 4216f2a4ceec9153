"""Feasible best-arm identification: algorithms, complexity oracle and experiment harness."""

from .instance import BanditInstance, GroundTruth, ground_truth, preset, validate

__version__ = "0.1.0"

__all__ = ["BanditInstance", "GroundTruth", "ground_truth", "preset", "validate"]
