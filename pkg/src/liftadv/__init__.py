"""Lifted-feature interpolation of constant labels: coefficients, exact and
Monte-Carlo risks, and the sweeps built on them."""

__version__ = "0.1.0"
