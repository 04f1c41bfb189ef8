"""Translate order-sorted Maude functional modules into many-sorted Athena theories."""

__version__ = "0.1.0"
