"""diskrat: best rational approximation on the unit disk from the command line."""

__version__ = "0.1.0"
