"""
Residual reports: the worst case per check key, with the inputs that produced it
"""
from dataclasses import dataclass, field
import logging
import math

from config import APP_VERSION

logger = logging.getLogger(__name__)


@dataclass
class ResidualEntry:
    key: str
    value: complex
    threshold: float
    inputs: dict = field(default_factory=dict)

    @property
    def abs(self):
        return abs(self.value)

    @property
    def passed(self):
        # NaN never passes
        return self.abs <= self.threshold

    def to_dict(self):
        value = complex(self.value)
        return {
            'key': self.key,
            'inputs': {k: _plain(v) for k, v in sorted(self.inputs.items())},
            'value_re': value.real,
            'value_im': value.imag,
            'abs': self.abs,
            'threshold': self.threshold,
            'pass': self.passed,
        }


def _worse(new, old):
    if math.isnan(old.abs):
        return False
    return math.isnan(new.abs) or new.abs > old.abs


def _plain(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, 'tolist'):
        return _plain(value.tolist())
    return value


class ResidualReport:
    """
    Aggregated check results.

    ``record`` keeps one entry per key: the one with the largest magnitude
    seen so far. ``notes`` carries informational values that are not checks.
    """

    def __init__(self, precision='double', seed=None, version=APP_VERSION):
        self.precision = precision
        self.seed = seed
        self.version = version
        self._entries = {}
        self.notes = {}
        self.checks_run = 0

    def record(self, key, value, threshold, **inputs):
        self.checks_run += 1
        entry = ResidualEntry(key, complex(value), float(threshold), dict(inputs))
        current = self._entries.get(key)
        if current is None or _worse(entry, current):
            self._entries[key] = entry
        return self._entries[key]

    def note(self, key, value):
        self.notes[key] = _plain(value)

    def merge(self, other):
        """Fold another report in, keeping the worst entry per key"""
        for entry in other.entries:
            self.record(entry.key, entry.value, entry.threshold, **entry.inputs)
        self.checks_run += other.checks_run - len(other.entries)
        self.notes.update(other.notes)
        return self

    @property
    def entries(self):
        return [self._entries[k] for k in sorted(self._entries)]

    def __getitem__(self, key):
        return self._entries[key]

    def __contains__(self, key):
        return key in self._entries

    def __len__(self):
        return len(self._entries)

    @property
    def failures(self):
        return [e for e in self.entries if not e.passed]

    @property
    def passed(self):
        return not self.failures

    @property
    def metadata(self):
        return {'version': self.version, 'precision': self.precision, 'seed': self.seed}

    def to_dict(self):
        return {
            'metadata': self.metadata,
            'passed': self.passed,
            'checks_run': self.checks_run,
            'entries': [e.to_dict() for e in self.entries],
            'notes': {k: self.notes[k] for k in sorted(self.notes)},
        }
