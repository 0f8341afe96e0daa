# app/core/config.py

"""
config.py: Laboratory Configuration

This module defines the process-level configuration settings for the sparse
singular-value laboratory. It uses environment variables and the python-dotenv
library to manage configuration, so the same code runs on a laptop, in CI and
behind the HTTP service without edits.

The Settings class encapsulates all configuration parameters, including:
- General project settings (name, log level)
- The campaign archive database URL
- Numerical limits shared by the spectral and Monte-Carlo services

Usage:
    from app.core.config import settings

    # Access configuration variables
    threads = settings.LAB_THREADS
    archive_url = settings.DATABASE_URL

Note:
    Values can be placed in a .env file in the project root, or set in the
    environment. Experiment-level knobs (n, p, trials, ...) do not live here;
    they come from the TOML config documents validated in app/schemas/config.py.
"""

import os
from dotenv import load_dotenv

# Load environment variables from the .env file
load_dotenv()


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    return int(raw) if raw not in (None, "") else default


def _float_env(name: str, default: float) -> float:
    raw = os.getenv(name)
    return float(raw) if raw not in (None, "") else default


class Settings:
    """
    Settings class to store all configuration variables.

    This class reads environment variables once, at import time. It's designed to
    be instantiated once and used throughout the application.
    """

    # General project settings
    PROJECT_NAME: str = os.getenv("PROJECT_NAME", "sparse-singular-lab")
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Campaign archive
    DATABASE_URL: str = os.getenv("DATABASE_URL", "sqlite:///./lab.db")

    # Trial-level parallelism; 0 means one worker per CPU
    LAB_THREADS: int = _int_env("LAB_THREADS", 0)

    # Above this dimension, norm-only campaigns sample straight into CSR storage
    LAB_DENSE_LIMIT: int = _int_env("LAB_DENSE_LIMIT", 2048)

    # Exact rational rank is used for discrete laws up to this dimension
    LAB_EXACT_RANK_LIMIT: int = _int_env("LAB_EXACT_RANK_LIMIT", 64)

    # Iteration budgets for the spectral solvers
    LAB_MAX_INVERSE_SWEEPS: int = _int_env("LAB_MAX_INVERSE_SWEEPS", 500)
    LAB_MAX_JACOBI_SWEEPS: int = _int_env("LAB_MAX_JACOBI_SWEEPS", 60)

    # s_min <= LAB_SINGULAR_RTOL * max(1, s_max) declares a matrix numerically singular
    LAB_SINGULAR_RTOL: float = _float_env("LAB_SINGULAR_RTOL", 1e-12)


# Instantiate the Settings class
# This creates a single instance of Settings to be used throughout the application
settings = Settings()
