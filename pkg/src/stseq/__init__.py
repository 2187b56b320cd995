"""Good point sequencings of Steiner triple systems."""

__version__ = "0.1.0"
