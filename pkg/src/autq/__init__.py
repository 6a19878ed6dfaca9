"""Exact order-automorphisms of countable dense orders and two-generator witnesses."""

__version__ = "0.1.0"
