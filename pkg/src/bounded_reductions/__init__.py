"""Executable reductions between undecidable problems and exact solvers for
their bounded versions."""

__version__ = "0.1.0"
