# app/models/campaign.py

from sqlalchemy import (
    JSON,
    BigInteger,
    Boolean,
    Column,
    DateTime,
    Float,
    ForeignKey,
    Integer,
    String
)
from sqlalchemy.orm import relationship
from sqlalchemy.sql import func

from app.db.base import Base


class Campaign(Base):
    """
    An archived Monte-Carlo campaign.

    Attributes:
        id (int): The primary key of the campaign.
        name (str): The campaign name from its ExperimentSpec.
        statistic (str): The per-trial statistic.
        master_seed (str): The unsigned 64-bit seed in decimal; it can exceed a signed BIGINT.
        trials (int): Trials per sweep point.
        spec (dict): The resolved ExperimentSpec, JSON-encoded.
        summary (dict): Per-point summaries, JSON-encoded.
        failures (int): Trials that raised instead of producing a value.
        created_at (datetime): The timestamp when the campaign was archived.
    """

    __tablename__ = "CAMPAIGNS"

    # Primary key
    id: int = Column(Integer, primary_key=True, autoincrement=True)
    # Core information
    name: str = Column(String(255), nullable=False, index=True, comment="Campaign name")
    statistic: str = Column(String(64), nullable=False, comment="Per-trial statistic")
    master_seed: str = Column(String(32), nullable=False, comment="Unsigned 64-bit seed in decimal")
    trials: int = Column(Integer, nullable=False, comment="Trials per sweep point")
    spec: dict = Column(JSON, nullable=False, comment="Resolved ExperimentSpec")
    summary: list = Column(JSON, nullable=False, comment="Per-point SummaryStats")
    failures: int = Column(Integer, nullable=False, default=0, comment="Failed trials")

    # Automatically managed timestamp field
    created_at: DateTime = Column(DateTime(timezone=True), server_default=func.now(),
                                  comment="Timestamp of archiving")

    trial_rows = relationship("CampaignTrial", back_populates="campaign", cascade="all, delete-orphan")


class CampaignTrial(Base):
    __tablename__ = "CAMPAIGN_TRIALS"

    id: int = Column(BigInteger().with_variant(Integer, "sqlite"), primary_key=True, autoincrement=True)
    campaign_id: int = Column(Integer, ForeignKey("CAMPAIGNS.id", ondelete="CASCADE"), nullable=False, index=True)
    point: int = Column(Integer, nullable=False, comment="Sweep point index")
    n: int = Column(Integer, nullable=False)
    p: float = Column(Float, nullable=False)
    trial_index: int = Column(Integer, nullable=False)
    value: float = Column(Float, nullable=True, comment="Statistic value, NULL when the trial failed")
    conditioned: bool = Column(Boolean, nullable=False, default=True)
    error: str = Column(String(1024), nullable=True)

    campaign = relationship("Campaign", back_populates="trial_rows")
