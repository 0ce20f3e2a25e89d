"""Static and dynamic analysis of 8x8 zero-sum experimental games."""

__version__ = "0.1.0"
