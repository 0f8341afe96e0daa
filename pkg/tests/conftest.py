import os

# The archive must be in memory before app.core.config reads the environment.
os.environ["DATABASE_URL"] = "sqlite://"
os.environ.setdefault("LAB_THREADS", "2")

import pytest

from app.schemas.ensemble import (
    EntryDistribution,
    EnsembleSpec,
    SeedSpec
)


@pytest.fixture
def rademacher_spec() -> EnsembleSpec:
    return EnsembleSpec(n=30, p=0.3, dist=EntryDistribution.rademacher())


@pytest.fixture
def seed() -> SeedSpec:
    return SeedSpec(master_seed=42, trial_index=0)
