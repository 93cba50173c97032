"""Generalized quantum natural gradient with Petz-function metrics."""

__version__ = "0.1.0"
