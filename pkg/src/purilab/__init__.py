"""Numerical laboratory for ancilla-assisted ("mixedness-trashing") qubit purification."""

__version__ = "0.1.0"
