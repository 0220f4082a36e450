"""Exact arithmetic for quadratic and Hermitian form classification,
p-adic maximal lattices, and bounded-norm solvers over orders in
semisimple Q-algebras, with a batch CLI."""

__version__ = "0.1.0"
