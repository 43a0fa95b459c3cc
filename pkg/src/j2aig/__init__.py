"""Bounded program verification through program-counter circuit encoding."""

__version__ = "0.1.0"
