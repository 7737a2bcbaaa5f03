"""Thruster-driven surface vessel model, sliding-mode teacher and neural autopilot."""

__version__ = "0.1.0"
