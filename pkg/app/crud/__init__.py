from .campaign import (
    CampaignRepository,
    get_campaign_repository
)

__all__ = [
    "CampaignRepository",
    "get_campaign_repository"
]
