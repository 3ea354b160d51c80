"""Exact-arithmetic lab for perturbed sum-product experiments."""

__version__ = "0.1.0"
