# app/db/session.py

"""
Session management for the campaign archive.

`SessionLocal` is the session factory bound to the archive engine; `get_db` yields
one session per request (or per CLI archive call) and always closes it.
"""

import logging
from typing import Iterator

from sqlalchemy.orm import (
    Session,
    sessionmaker
)

from .init_db import engine

logger = logging.getLogger(__name__)

# expire_on_commit=False keeps archived rows readable after the session commits
SessionLocal: sessionmaker[Session] = sessionmaker(
    bind=engine,
    expire_on_commit=False,
)


def get_db() -> Iterator[Session]:
    """
    Database session dependency.

    Yields:
        Session: A SQLAlchemy session, closed when the caller is done.

    Example usage in a FastAPI route:
        @router.get("/experiments")
        def list_experiments(db: Session = Depends(get_db)):
            ...
    """
    session = SessionLocal()
    logger.debug("Database session opened")
    try:
        yield session
    except Exception as e:
        logger.error("Error during database session: %s", e)
        session.rollback()
        raise
    finally:
        logger.debug("Database session closed")
        session.close()
