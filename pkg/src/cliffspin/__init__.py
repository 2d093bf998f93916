"""Exact Clifford analysis toolkit for higher order, higher spin conformal operators."""

__version__ = "0.1.0"
