"""Constraint-based 3D scene layout: solver, generation pipeline, editing, service."""

__version__ = "0.1.0"
