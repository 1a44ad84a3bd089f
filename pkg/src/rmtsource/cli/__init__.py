"""Command-line interface for rmtsource."""
