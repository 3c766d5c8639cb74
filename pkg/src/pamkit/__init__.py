"""Passive acoustic mapping toolkit."""
