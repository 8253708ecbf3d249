"""Operational risk assessment for power grids: DC optimal power flow,
correlated scenario sampling, graph-network surrogates and Monte Carlo
risk estimators."""

__version__ = "0.1.0"
