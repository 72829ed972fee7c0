"""Desk-scale laboratory for the nonexistence of differentiable perfect
learning algorithms for three-layer networks."""

__version__ = "0.1.0"
