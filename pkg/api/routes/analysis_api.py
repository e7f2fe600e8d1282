from __future__ import annotations

import asyncio

from fastapi import APIRouter, HTTPException

from config import NUMERIC_TOL
from errors import ReplicatorException
from models.schemas import AnalysisReport, ClassificationReportModel, GameSpec, SCHEMAS, schema_for
from services.report_service import build_analysis_report, build_classification_report

router = APIRouter()


@router.post("/analyze", response_model=AnalysisReport)
async def analyze_game(request: GameSpec, tol_scale: float = 1.0):
    """Static analysis of the modified game: equalizers, equilibria, definiteness, Dirichlet law.

    Runs in a worker thread; the LPs and SVDs are synchronous.
    """
    if not tol_scale > 0:
        raise HTTPException(status_code=422, detail="tol_scale must be positive")
    try:
        game = request.to_game()
        return await asyncio.to_thread(build_analysis_report, game, NUMERIC_TOL * tol_scale)
    except ReplicatorException:
        raise
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/classify", response_model=ClassificationReportModel)
async def classify_game(request: GameSpec, tol_scale: float = 1.0):
    """Long-run label with the certificate that justifies it."""
    if not tol_scale > 0:
        raise HTTPException(status_code=422, detail="tol_scale must be positive")
    try:
        game = request.to_game()
        return await asyncio.to_thread(build_classification_report, game, NUMERIC_TOL * tol_scale)
    except ReplicatorException:
        raise
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.get("/schemas")
async def list_schemas():
    return {"schemas": sorted(SCHEMAS)}


@router.get("/schemas/{name}")
async def get_schema(name: str):
    """Published JSON schema of a game file, report or manifest."""
    if name not in SCHEMAS:
        raise HTTPException(status_code=404, detail=f"Unknown schema {name}")
    return schema_for(name)
