"""Cleaving round spheres: trees of hyperplanes, blueprints, collapse maps."""

__version__ = "0.1.0"
