"""Pauli constraints on spin-orbital occupations and magnetic moment bounds."""

__version__ = "0.1.0"
