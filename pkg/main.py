# main.py - FastAPI Application for the Stochastic Replicator Lab
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from contextlib import asynccontextmanager

# Import routers
from api.routes import analysis_api as analysis
from api.routes import simulation_api as simulation

# Import middleware and config
from api.middleware import setup_exception_handlers
from api.middleware.error_handler import log_requests
from config import API_HOST, API_MAX_STEPS, API_PORT, CORS_ORIGINS, DEBUG, ENV, NUMERIC_TOL, TOOL_VERSION
from errors import logger


# ================================
# Lifespan events (startup/shutdown)
# ================================
@asynccontextmanager
async def lifespan(app: FastAPI):
    """Handle startup and shutdown events."""
    logger.info("Starting Stochastic Replicator Lab API")
    logger.info(f"   Environment: {ENV}")
    logger.info(f"   Tolerance: {NUMERIC_TOL:g}, max simulation steps per request: {API_MAX_STEPS}")

    yield  # Application runs

    logger.info("Shutting down Stochastic Replicator Lab API")


# ================================
# Create FastAPI app
# ================================
app = FastAPI(
    title="Stochastic Replicator Lab",
    description="""
**Stochastic Replicator Lab** - symmetric games under Gaussian aggregate shocks.

## Endpoints
- `/api/analyze` - Modified game, equalizer set, equilibria, definiteness, Dirichlet law
- `/api/classify` - Long-run label with its certificate
- `/api/simulate` - One simulated trajectory, summarized by the ergodic estimators
- `/api/schemas/{name}` - Published JSON schemas

## Game format
`{"payoff": [[...]], "sigma": [...], "interpretation": "ito" | "stratonovich"}`
    """,
    version=TOOL_VERSION,
    lifespan=lifespan
)


# ================================
# Middleware Setup
# ================================
# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Custom exception handlers
setup_exception_handlers(app)

# Request logging
app.middleware("http")(log_requests)


# ================================
# Include Routers
# ================================
app.include_router(analysis.router, prefix="/api", tags=["Analysis"])
app.include_router(simulation.router, prefix="/api", tags=["Simulation"])


# ================================
# Root Endpoints
# ================================
@app.get("/", tags=["Status"])
def root():
    """Welcome endpoint."""
    return {
        "message": "Stochastic Replicator Lab is running",
        "version": TOOL_VERSION,
        "docs": "/docs",
        "health": "/health"
    }


@app.get("/health", tags=["Status"])
def health():
    """Health check endpoint."""
    return {
        "status": "healthy",
        "service": "Stochastic Replicator Lab",
        "version": TOOL_VERSION,
        "environment": ENV,
        "limits": {
            "numeric_tol": NUMERIC_TOL,
            "max_steps": API_MAX_STEPS
        }
    }


# ================================
# Run with: python -m uvicorn main:app --reload
# ================================
if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "main:app",
        host=API_HOST,
        port=API_PORT,
        reload=DEBUG
    )
