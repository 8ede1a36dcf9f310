"""Simulator for the EMF correlation spectrum of a driven nanomechanical
resonator coupled to a charge qubit."""

__version__ = "0.1.0"
