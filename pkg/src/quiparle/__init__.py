"""Quote attribution and gender-representation statistics for French news."""

__version__ = "0.1.0"
