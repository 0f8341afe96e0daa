# app/api/routers/v1/__init__.py
from fastapi import APIRouter

from .ensembles import router as ensembles_router
from .experiments import router as experiments_router
from .geometry import router as geometry_router
from .spectral import router as spectral_router

router = APIRouter()

# Sub-routers per service
router.include_router(ensembles_router, prefix="/ensembles", tags=["Ensembles"])
router.include_router(spectral_router, prefix="/spectral", tags=["Spectral"])
router.include_router(geometry_router, prefix="/geometry", tags=["Geometry"])
router.include_router(experiments_router, prefix="/experiments", tags=["Experiments"])


@router.get("/", tags=["root"])
def read_v1_root():
    return {"message": "Sparse singular-value laboratory API v1"}
