"""Workbench for exact digit expansions, continued-fraction interval audits,
multiplicative-subgroup scans, and equidistribution statistics."""

__version__ = "0.1.0"
