"""
Floating backends for closed-form evaluation.

``DOUBLE`` evaluates with numpy in IEEE double precision. ``HighPrecision``
evaluates with mpmath inside a ``workdps`` context so the caller's global
mpmath precision is left alone. Closed-form routines wrap their whole body
in ``backend.context()`` and convert results with ``backend.to_complex`` /
``backend.to_float`` before returning.
"""
import contextlib
import logging

import numpy as np
from mpmath import mp

from errors import InvalidArgument

logger = logging.getLogger(__name__)

DEFAULT_HIGH_DIGITS = 50


class DoublePrecision:
    name = 'double'

    def context(self):
        return contextlib.nullcontext()

    @property
    def pi(self):
        return np.pi

    def real(self, x):
        return float(x)

    def sin(self, x):
        return np.sin(x)

    def cos(self, x):
        return np.cos(x)

    def expi(self, theta):
        """exp(i*theta)"""
        return complex(np.exp(1j * theta))

    def conj(self, z):
        return np.conj(z)

    def to_complex(self, z):
        return complex(z)

    def to_float(self, x):
        return float(x)


class HighPrecision:
    name = 'high'

    def __init__(self, digits=DEFAULT_HIGH_DIGITS):
        if digits < 20:
            raise InvalidArgument(f"high precision needs at least 20 digits, got {digits}")
        self.digits = digits

    def context(self):
        return mp.workdps(self.digits)

    @property
    def pi(self):
        return +mp.pi

    def real(self, x):
        return mp.mpf(x)

    def sin(self, x):
        return mp.sin(x)

    def cos(self, x):
        return mp.cos(x)

    def expi(self, theta):
        return mp.expj(theta)

    def conj(self, z):
        return mp.conj(z)

    def to_complex(self, z):
        return complex(mp.mpc(z))

    def to_float(self, x):
        return float(mp.re(x)) if isinstance(x, mp.mpc) else float(x)


DOUBLE = DoublePrecision()


def get_backend(precision='double', digits=DEFAULT_HIGH_DIGITS):
    """Resolve a backend from its CLI/config name"""
    if precision is None or precision == 'double':
        return DOUBLE
    if precision == 'high':
        return HighPrecision(digits)
    raise InvalidArgument(f"unknown precision mode: {precision!r}")
