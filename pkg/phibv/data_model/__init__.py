"""Data model module."""
