from .campaign import (
    Campaign,
    CampaignTrial
)

__all__ = [
    "Campaign",
    "CampaignTrial"
]
