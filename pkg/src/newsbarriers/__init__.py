"""Barrier annotation of news events and concept-augmented text classification."""

__version__ = "0.1.0"
