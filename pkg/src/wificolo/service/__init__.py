"""HTTP front end wrapping the core package."""

from wificolo.service.app import create_app

__all__ = ["create_app"]
