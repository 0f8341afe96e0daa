# app/db/init_db.py

import logging

from sqlalchemy import (
    Engine,
    create_engine
)
from sqlalchemy.pool import StaticPool

from app.core.config import settings
from app.db.base import Base

logger = logging.getLogger(__name__)


def build_engine(url: str) -> Engine:
    """Create the archive engine.

    An in-memory SQLite URL gets a single shared connection, so the tables created
    by init_db stay visible to every session and thread.
    """
    if url.startswith("sqlite"):
        options = {"connect_args": {"check_same_thread": False}}
        if url in ("sqlite://", "sqlite:///:memory:"):
            options["poolclass"] = StaticPool
        return create_engine(url, **options)
    return create_engine(url, pool_pre_ping=True)


# The DATABASE_URL defaults to a SQLite file next to the working directory
engine: Engine = build_engine(settings.DATABASE_URL)


def init_db() -> None:
    """
    Create every archive table that does not exist yet.

    Note: existing tables are not migrated when the models change.
    """
    # Imported for its side effect of registering the models on Base.metadata
    from app.models import campaign  # noqa: F401

    Base.metadata.create_all(bind=engine)
    logger.info("Campaign archive ready at %s", engine.url.render_as_string(hide_password=True))


def close_db() -> None:
    """Dispose of the connection pool."""
    engine.dispose()
