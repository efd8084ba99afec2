"""
Core subpackage for the kummerlag parent package.

This package contains the exact lattice arithmetic: Gram forms, integer
kernels and normal forms, short vector enumeration and the Kummer lattice.
"""
