"""Laboratory for distributed list accessing."""

__version__ = "0.1.0"
