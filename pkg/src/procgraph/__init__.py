"""Function-oriented procedural texture and scene generation."""

__version__ = "0.1.0"
