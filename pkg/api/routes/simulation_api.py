from __future__ import annotations

import asyncio
import logging

from fastapi import APIRouter, HTTPException

from config import API_MAX_STEPS, NUMERIC_TOL
from errors import ConfigurationError, ReplicatorException
from models.schemas import EstimatorReport, SimulateRequest
from replicator.sde_sim import SimConfig, simulate
from services.report_service import build_estimator_report

logger = logging.getLogger("replicator.api")

router = APIRouter()


def run_simulation(request: SimulateRequest) -> dict:
    game = request.game.to_game()
    cfg = SimConfig(
        t_final=request.t_final,
        dt=request.dt,
        seed=request.seed,
        record_stride=request.stride,
        x0=request.start_point(),
    )
    if cfg.n_steps > API_MAX_STEPS:
        raise ConfigurationError(f"{cfg.n_steps} steps exceed the API limit of {API_MAX_STEPS}; use the CLI")
    traj = simulate(game, cfg)
    report = build_estimator_report(game, traj, request.burn_in, NUMERIC_TOL)
    report["config"] = cfg.to_dict(game.n)
    return report


@router.post("/simulate", response_model=EstimatorReport)
async def simulate_game(request: SimulateRequest):
    """Simulate one trajectory and return the estimator report (the trajectory itself stays server-side)."""
    try:
        return await asyncio.to_thread(run_simulation, request)
    except ReplicatorException:
        raise
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
