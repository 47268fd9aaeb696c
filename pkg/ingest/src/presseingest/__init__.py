"""Raw-text ingestion for the quote-attribution pipeline."""

__version__ = "0.1.0"
