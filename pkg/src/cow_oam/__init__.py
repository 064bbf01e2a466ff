"""Cooperative OAM wireless communication: beam physics, CU pair selection,
formation probability and mode-multiplexed spectrum efficiency."""

from .beam import Beam
from .scenario import PolarPoint, ScenarioConfig
from .selection import SelectionResult, UserField, select_pair

__all__ = ["Beam", "PolarPoint", "ScenarioConfig", "SelectionResult", "UserField", "select_pair"]
__version__ = "0.1.0"
