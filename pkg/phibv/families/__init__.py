"""Φ-function families."""
