"""Simulation of Majorana zero-mode braiding on small qubit registers."""

__version__ = "0.1.0"
