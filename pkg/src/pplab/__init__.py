"""Plane-partition statistics: exact series, bijections, sampling, asymptotics."""

__version__ = "0.1.0"
