"""IO package."""
