# app/db/__init__.py

from .base import Base
from .init_db import (
    engine,
    init_db,
    close_db
)
from .session import (
    SessionLocal,
    get_db
)

__all__ = [
    "Base",  # Declarative base of the archive tables
    "engine",  # Engine built from settings.DATABASE_URL
    "init_db",  # Creates the archive tables
    "close_db",  # Disposes of the connection pool
    "SessionLocal",  # Session factory
    "get_db",  # Session dependency for FastAPI routes
]
