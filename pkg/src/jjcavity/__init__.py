"""Charge qubits coupled through microwave cavities: Hamiltonians, gates and
two-cavity state transfer."""

from jjcavity.device import CavityParams, DeviceModel, QubitParams
from jjcavity.operators import GateReport

__all__ = ["CavityParams", "DeviceModel", "QubitParams", "GateReport"]
__version__ = "0.1.0"
