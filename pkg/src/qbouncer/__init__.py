"""Quantum bouncer wave-packet revivals and entropic uncertainty products."""

__version__ = "0.1.0"
