"""
app/api/routers/v1/experiments.py

Campaign endpoints. Every campaign run through the service is archived.

Endpoint Details:
- POST /: runs an ExperimentSpec, archives it and returns the archived summary.
- GET /: lists archived campaigns, newest first.
- GET /{campaign_id}: one archived campaign with its resolved spec.
- GET /{campaign_id}/trials: its trial records in (point, trial_index) order.
"""

import logging
from typing import Annotated

from fastapi import (
    APIRouter,
    Depends,
    HTTPException,
    Query
)
from sqlalchemy.exc import SQLAlchemyError

from app.api.dependencies import as_http_error
from app.core.exceptions import LabError
from app.crud.campaign import (
    CampaignRepository,
    get_campaign_repository
)
from app.schemas.archive import (
    ArchivedTrial,
    CampaignDetail,
    CampaignInfo
)
from app.schemas.experiment import ExperimentSpec
from app.services.montecarlo import run_experiment

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("", response_model=CampaignDetail, status_code=201)
def create_experiment(
        spec: ExperimentSpec,
        repo: Annotated[CampaignRepository, Depends(get_campaign_repository)]
) -> CampaignDetail:
    """
    Run a campaign and archive it.

    Args:
        spec (ExperimentSpec): The campaign to run; trials execute in a worker thread pool.
        repo (CampaignRepository): Archive access, injected per request.

    Returns:
        CampaignDetail: The archived campaign, including its id and summaries.

    Raises:
        HTTPException: 422 on an invalid spec, 500 if archiving fails.
    """
    try:
        result = run_experiment(spec)
    except LabError as e:
        raise as_http_error(e)
    try:
        campaign = repo.create_campaign(result)
    except SQLAlchemyError as e:
        raise HTTPException(status_code=500, detail=f"archiving failed: {e}")
    return CampaignDetail.model_validate(campaign)


@router.get("", response_model=list[CampaignInfo])
def list_experiments(
        repo: Annotated[CampaignRepository, Depends(get_campaign_repository)],
        limit: Annotated[int, Query(ge=1, le=1000)] = 100,
        offset: Annotated[int, Query(ge=0)] = 0
) -> list[CampaignInfo]:
    """
    List archived campaigns, newest first.

    Args:
        repo (CampaignRepository): Archive access, injected per request.
        limit (int): Page size, 1 to 1000.
        offset (int): Number of campaigns to skip.

    Returns:
        list[CampaignInfo]: One entry per campaign without its spec or summaries.
    """
    return [CampaignInfo.model_validate(c) for c in repo.list_campaigns(limit, offset)]


@router.get("/{campaign_id}", response_model=CampaignDetail)
def get_experiment(
        campaign_id: int,
        repo: Annotated[CampaignRepository, Depends(get_campaign_repository)]
) -> CampaignDetail:
    """
    Fetch one archived campaign.

    Args:
        campaign_id (int): Archive id returned by POST /.
        repo (CampaignRepository): Archive access, injected per request.

    Returns:
        CampaignDetail: The campaign with its resolved spec and per-point summaries.

    Raises:
        HTTPException: 404 if no campaign has this id.
    """
    campaign = repo.get_campaign(campaign_id)
    if campaign is None:
        raise HTTPException(status_code=404, detail=f"campaign {campaign_id} not found")
    return CampaignDetail.model_validate(campaign)


@router.get("/{campaign_id}/trials", response_model=list[ArchivedTrial])
def get_experiment_trials(
        campaign_id: int,
        repo: Annotated[CampaignRepository, Depends(get_campaign_repository)]
) -> list[ArchivedTrial]:
    """
    List the trial records of an archived campaign.

    Args:
        campaign_id (int): Archive id returned by POST /.
        repo (CampaignRepository): Archive access, injected per request.

    Returns:
        list[ArchivedTrial]: Records in (point, trial_index) order; failed trials carry their error.

    Raises:
        HTTPException: 404 if no campaign has this id.
    """
    if repo.get_campaign(campaign_id) is None:
        raise HTTPException(status_code=404, detail=f"campaign {campaign_id} not found")
    return [ArchivedTrial.model_validate(t) for t in repo.list_trials(campaign_id)]
