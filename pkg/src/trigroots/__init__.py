"""Root statistics of random trigonometric polynomials."""

__version__ = "0.1.0"
