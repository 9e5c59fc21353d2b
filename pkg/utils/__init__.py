"""
Saturable Battery Simulator Utilities

Shared utilities for presets, display names and output formatting.
"""
