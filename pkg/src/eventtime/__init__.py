"""Event time prediction via sub-level temporal relations."""
__version__ = "0.1.0"
