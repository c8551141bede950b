"""Label reconciliation, recommendation, and hierarchy tooling for twin
image-annotation corpora."""

__version__ = "0.1.0"
