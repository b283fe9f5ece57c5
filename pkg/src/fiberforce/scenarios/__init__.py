"""Bundled scan configurations (YAML data files)."""
