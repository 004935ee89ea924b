"""
looplab - Main Entry Point

    python app.py verify dense --lambda 0.1:1.5:0.1 --alpha 0.1:3.0:0.1 --ell 0,1
    python app.py verify dilute --eta 0.05:0.75:0.05
    python app.py zinv --model dilute
    python app.py appendix --draws 100 --seed 7
"""
from flask import Flask
from flask.cli import FlaskGroup
import logging

from config import Config


def create_app(config_class=Config):
    """Application factory: configuration, logging and command registration"""
    app = Flask(__name__)
    app.config.from_object(config_class)

    # Configure logging
    level = getattr(logging, app.config.get('LOG_LEVEL', 'INFO'), logging.INFO)
    logging.basicConfig(level=level)
    logging.getLogger(__name__).setLevel(level)

    from commands import register_commands
    register_commands(app)
    return app


cli = FlaskGroup(
    create_app=create_app,
    add_default_commands=False,
    help="Numerical verification of loop-model integrability identities.",
)


if __name__ == '__main__':
    cli()
