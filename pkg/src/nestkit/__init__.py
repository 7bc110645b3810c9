"""nestkit: construction, composition and exhaustive verification of nested
block designs, group-divisible designs and relative difference families."""

__version__ = "0.1.0"
