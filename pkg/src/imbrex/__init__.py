"""Finite imbrex geometries: construction and axiom verification."""
