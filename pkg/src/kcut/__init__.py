"""Monte Carlo, exact and asymptotic tools for the k-cut model of random graph destruction."""

__version__ = "0.1.0"
