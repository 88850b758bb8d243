"""FastAPI service and its configuration."""

from relart.service.app import create_app
from relart.service.config import ServiceConfig, load_config

__all__ = ["create_app", "ServiceConfig", "load_config"]
