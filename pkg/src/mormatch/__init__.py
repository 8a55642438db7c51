"""Model reduction of SISO LTI systems by exact and least-squares moment matching."""

__version__ = '0.1.0'
