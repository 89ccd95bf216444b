"""Event-driven digital twin of a short-video platform."""

__version__ = "0.1.0"
