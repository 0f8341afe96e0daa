"""
FastAPI application for the sparse singular-value laboratory.

This module builds the ASGI app: a lifespan context manager that prepares and
releases the campaign archive, and the versioned API router mounted under /api.

Run it with ``python -m app serve`` or directly with uvicorn:

    uvicorn app.main:app --host 127.0.0.1 --port 8000
"""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI

from app import __version__
from app.api import api_router
from app.core.config import settings
from app.db import (
    init_db,
    close_db
)

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(_app: FastAPI):
    """Create the archive tables at startup and dispose of the pool at shutdown.

    Args:
        _app (FastAPI): The FastAPI application instance.
    """
    init_db()
    yield
    close_db()


app = FastAPI(title=settings.PROJECT_NAME, version=__version__, lifespan=lifespan)

app.include_router(api_router, prefix="/api")


@app.get("/")
def root():
    """Root endpoint.

    Returns:
        dict: The service name and package version.
    """
    return {"message": f"Welcome to {settings.PROJECT_NAME}", "version": __version__}


if __name__ == "__main__":
    import uvicorn

    logging.basicConfig(level=settings.LOG_LEVEL)
    uvicorn.run(app, host="127.0.0.1", port=8000)
