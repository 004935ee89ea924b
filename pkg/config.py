import os
import logging
from dotenv import load_dotenv

basedir = os.path.abspath(os.path.dirname(__file__))
load_dotenv(os.path.join(basedir, '.env'))

APP_NAME = 'looplab'
APP_VERSION = '1.0.0'

_PRECISION_MODES = ('double', 'high')


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw == '':
        return default
    try:
        return int(float(raw)) if 'e' in raw.lower() else int(raw)
    except ValueError:
        logging.warning(f'CONFIG: {name}={raw!r} is not an integer, using {default}')
        return default


def _env_float(name, default):
    raw = os.environ.get(name)
    if raw is None or raw == '':
        return default
    try:
        return float(raw)
    except ValueError:
        logging.warning(f'CONFIG: {name}={raw!r} is not a number, using {default}')
        return default


class Config:
    # Enumeration cap (number of raw state assignments); LOOPLAB_MAX_CONFIGS overrides
    LOOPLAB_MAX_CONFIGS = _env_int('LOOPLAB_MAX_CONFIGS', 10 ** 8)

    _raw_precision = os.environ.get('LOOPLAB_PRECISION', 'double').lower()
    if _raw_precision not in _PRECISION_MODES:
        logging.warning(
            f'CONFIG: LOOPLAB_PRECISION={_raw_precision!r} is not one of {_PRECISION_MODES}, '
            'falling back to double precision.'
        )
        _raw_precision = 'double'
    LOOPLAB_PRECISION = _raw_precision
    LOOPLAB_HIGH_DIGITS = _env_int('LOOPLAB_HIGH_DIGITS', 50)

    LOOPLAB_TOLERANCE = _env_float('LOOPLAB_TOLERANCE', 1e-10)
    LOOPLAB_SEED = _env_int('LOOPLAB_SEED', 7)
    LOOPLAB_WORKERS = _env_int('LOOPLAB_WORKERS', 1)

    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO').upper()
