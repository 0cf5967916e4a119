"""
API v1 - сервис прогонов генеалогии с фоновым выполнением.
"""
from .routes import router

__all__ = ['router']
