"""Length spectra of nilmanifolds.

Thin wrapper over the compiled core. Rational coordinates are fractions.Fraction.
"""

from ._core import (
    bch_product,
    compare,
    examples,
    heisenberg_central_lengths,
    is_conjugate_in_G,
    labels,
    marking_passed,
    multiplicity,
    run,
    step,
    translated_geodesic,
)

__all__ = [
    "bch_product",
    "compare",
    "examples",
    "heisenberg_central_lengths",
    "is_conjugate_in_G",
    "labels",
    "marking_passed",
    "multiplicity",
    "run",
    "step",
    "translated_geodesic",
]
