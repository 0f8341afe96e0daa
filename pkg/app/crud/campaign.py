# app/crud/campaign.py

"""
This module provides the CampaignRepository class for archiving Monte-Carlo
campaigns with SQLAlchemy, and the FastAPI dependency that builds it from a
request-scoped session.
"""

import logging
import math
from typing import (
    Annotated,
    Optional
)

from fastapi import Depends
from sqlalchemy import select
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session

from app.db.session import get_db
from app.models.campaign import (
    Campaign,
    CampaignTrial
)
from app.schemas.experiment import ExperimentResult

logger = logging.getLogger(__name__)


class CampaignRepository:
    """Repository for archived campaigns and their trials."""

    def __init__(self, db: Session) -> None:
        """
        Args:
            db (Session): The database session to be used for operations.
        """
        self.db: Session = db

    def create_campaign(self, result: ExperimentResult) -> Campaign:
        """
        Archive a finished campaign with all of its trial records.

        Args:
            result (ExperimentResult): The campaign to store.

        Returns:
            Campaign: The stored row, with its generated id.

        Raises:
            SQLAlchemyError: If the transaction fails; it is rolled back first.
        """
        spec = result.spec
        campaign = Campaign(
            name=spec.name,
            statistic=spec.statistic,
            master_seed=str(spec.master_seed),
            trials=spec.trials,
            spec=spec.model_dump(mode="json"),
            summary=[point.model_dump(mode="json") for point in result.points],
            failures=sum(1 for record in result.records if record.error is not None),
        )
        campaign.trial_rows = [
            CampaignTrial(
                point=record.point,
                n=record.n,
                p=record.p,
                trial_index=record.trial_index,
                # NaN has no portable SQL representation
                value=None if math.isnan(record.value) else record.value,
                conditioned=record.conditioned,
                error=record.error[:1024] if record.error else None,
            )
            for record in result.records
        ]
        try:
            self.db.add(campaign)
            self.db.commit()
            self.db.refresh(campaign)
        except SQLAlchemyError as e:
            logger.error("Database error while archiving campaign %s: %s", spec.name, e)
            self.db.rollback()
            raise
        logger.info("Archived campaign %s as id %d (%d trials)", spec.name, campaign.id, len(result.records))
        return campaign

    def get_campaign(self, campaign_id: int) -> Optional[Campaign]:
        return self.db.get(Campaign, campaign_id)

    def list_campaigns(self, limit: int = 100, offset: int = 0) -> list[Campaign]:
        query = select(Campaign).order_by(Campaign.id.desc()).offset(offset).limit(limit)
        return list(self.db.scalars(query))

    def list_trials(self, campaign_id: int) -> list[CampaignTrial]:
        query = (
            select(CampaignTrial)
            .where(CampaignTrial.campaign_id == campaign_id)
            .order_by(CampaignTrial.point, CampaignTrial.trial_index)
        )
        return list(self.db.scalars(query))


def get_campaign_repository(
        db: Annotated[Session, Depends(get_db)]
) -> CampaignRepository:
    """Dependency function to get the CampaignRepository instance.

    Args:
        db (Session): The database session dependency.

    Returns:
        CampaignRepository: An instance of CampaignRepository.
    """
    return CampaignRepository(db)
