"""Sweep configuration and result-table I/O."""
