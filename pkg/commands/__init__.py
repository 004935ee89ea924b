"""
Commands Package - Modularized Command Registration
"""
from flask import Flask
import logging

logger = logging.getLogger(__name__)


def register_commands(app: Flask):
    """
    Register all command blueprints with the Flask app

    Args:
        app: Flask application instance
    """
    # Import all blueprints
    from commands.verify import verify_bp
    from commands.zinv import zinv_bp
    from commands.elimination import appendix_bp

    # Register blueprints
    app.register_blueprint(verify_bp)
    app.register_blueprint(zinv_bp)
    app.register_blueprint(appendix_bp)

    logger.info("✓ All commands registered successfully")
