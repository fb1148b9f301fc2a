"""Numerical verification toolkit for pluriharmonic maps into homogeneous spaces."""

__version__ = "0.1.0"
