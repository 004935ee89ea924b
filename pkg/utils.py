"""
Numeric utility functions used across the package
"""
import math

import numpy as np

# Grid used to identify coincident points produced by floating construction
SNAP_GRID = 1e-9


def snap(z, grid=SNAP_GRID):
    """Hashable key for a complex coordinate, snapped to the grid"""
    return (int(round(z.real / grid)), int(round(z.imag / grid)))


def principal_arg(z):
    """Argument of z in (-pi, pi]"""
    angle = float(np.angle(z))
    if angle <= -math.pi:
        angle += 2 * math.pi
    return angle


def complex_fsum(values):
    """Order-insensitive sum of complex values (compensated on both parts)"""
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


class ComplexAccumulator:
    """Running compensated sum; partial accumulators merge exactly"""

    def __init__(self):
        self._re = []
        self._im = []

    def add(self, value):
        value = complex(value)
        self._re.append(value.real)
        self._im.append(value.imag)

    def merge(self, other):
        self._re.extend(other._re)
        self._im.extend(other._im)
        return self

    @property
    def value(self):
        return complex(math.fsum(self._re), math.fsum(self._im))


def max_abs(values, default=0.0):
    """Largest magnitude in an iterable of numbers"""
    return max((abs(v) for v in values), default=default)


def relative_gap(x, y):
    """|x - y| scaled by max(1, |x|, |y|)"""
    return abs(x - y) / max(1.0, abs(x), abs(y))
