"""Finite-dimensional coherent and squeezed states in driven Kerr media."""

from fdstates.base import Scenario, ScenarioConfig
from fdstates.model import KerrModel
from fdstates.operators import DensityMatrix, Operator, StateVector
