import pytest

from app import create_app
from config import Config


class TestConfig(Config):
    TESTING = True
    LOG_LEVEL = 'WARNING'
    LOOPLAB_WORKERS = 1
    LOOPLAB_PRECISION = 'double'
    LOOPLAB_TOLERANCE = 1e-10


@pytest.fixture
def app():
    return create_app(TestConfig)


@pytest.fixture
def runner(app):
    return app.test_cli_runner()
