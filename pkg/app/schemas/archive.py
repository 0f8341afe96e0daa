from datetime import datetime
from typing import (
    Any,
    Optional
)

from pydantic import (
    BaseModel,
    ConfigDict,
    field_validator
)

from app.schemas.experiment import PointSummary
from app.schemas.types import Real


class CampaignInfo(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    id: int
    name: str
    statistic: str
    master_seed: int
    trials: int
    failures: int
    summary: list[PointSummary]
    created_at: Optional[datetime] = None

    @field_validator("master_seed", mode="before")
    @classmethod
    def _decimal_seed(cls, value: Any) -> int:
        return int(value)


class CampaignDetail(CampaignInfo):
    spec: dict[str, Any]


class ArchivedTrial(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    point: int
    n: int
    p: float
    trial_index: int
    value: Optional[Real] = None
    conditioned: bool
    error: Optional[str] = None
