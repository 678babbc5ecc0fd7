"""Unit conventions.

Internally every angular frequency is stored in rad/us. Configuration files
and serialized documents carry frequencies in "MHz_2pi" instead: a key worth
x there means x * 2*pi rad/us. Keys carrying such values are suffixed
``_MHz2pi`` so the unit is visible at the call site. Times are microseconds
and lengths micrometers everywhere; those are never converted.
"""

from __future__ import annotations

import math

TWO_PI = 2.0 * math.pi


def from_mhz2pi(value):
    """MHz_2pi -> rad/us. Works on floats and numpy arrays."""
    return value * TWO_PI


def to_mhz2pi(value):
    """rad/us -> MHz_2pi. Works on floats and numpy arrays."""
    return value / TWO_PI
