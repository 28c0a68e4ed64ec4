"""Class groups of imaginary quadratic fields via binary quadratic forms."""

__version__ = "0.1.0"
