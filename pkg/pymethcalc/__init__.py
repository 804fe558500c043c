"""Exact calculus of boundary problems for linear ordinary differential equations."""
