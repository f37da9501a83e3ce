"""Flow-table preprocessing, filter-based feature selection, and binary traffic classifiers."""

__version__ = "0.1.0"
