# app/api/__init__.py

from .routers import router as api_router

__all__ = ["api_router"]
