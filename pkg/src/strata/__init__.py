"""Virtual functions of real parabolic singularities."""
__version__ = "0.1.0"
