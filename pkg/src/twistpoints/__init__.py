"""Low-height rational points on quadratic twists of elliptic curves."""

__version__ = "0.1.0"
