"""Perun tests module."""
