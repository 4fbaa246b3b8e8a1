"""Pydantic contracts for drht's files and run configuration."""
