"""Standalone oracles used to derive frozen expected values.

Each module here re-derives quantities with plain scalar Python math,
independent of the vectorized implementation under src/. Run any module
directly to print the values frozen into the test suite.
"""
