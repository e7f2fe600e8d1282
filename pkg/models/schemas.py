# models/schemas.py - Request models and the published report schemas
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, ValidationError

from config import DEFAULT_DT
from errors import GameValidationError
from replicator.game_model import Game, Interpretation, SimplexPoint


# ================================
# Inputs
# ================================

class GameSpec(BaseModel):
    """Game file / request body: {"payoff": [[...]], "sigma": [...], "interpretation": "ito"}."""
    payoff: List[List[float]]
    sigma: List[float]
    interpretation: Literal["ito", "stratonovich"] = "ito"

    def to_game(self) -> Game:
        return Game(
            payoff=self.payoff,
            sigma=self.sigma,
            interpretation=Interpretation(self.interpretation),
        )


def parse_game(data: Any) -> Game:
    """Validate a decoded game document; every failure is a GameValidationError."""
    try:
        spec = GameSpec.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "document"
        raise GameValidationError("game file parses against the Game schema", f"{where}: {first['msg']}")
    return spec.to_game()


class SimulateRequest(BaseModel):
    game: GameSpec
    t_final: float = Field(gt=0)
    dt: float = Field(default=DEFAULT_DT, gt=0)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    x0: Optional[List[float]] = None
    stride: Optional[int] = Field(default=None, ge=1)
    burn_in: Optional[float] = Field(default=None, ge=0)

    def start_point(self) -> Optional[SimplexPoint]:
        return None if self.x0 is None else SimplexPoint.from_weights(self.x0)


# ================================
# Reports (published JSON schemas)
# ================================

class EqualizerModel(BaseModel):
    kind: Literal["Empty", "UniquePoint", "AffineSubspace"]
    point: Optional[List[float]] = None
    basis: Optional[List[List[float]]] = None
    in_simplex: Optional[Literal["Interior", "Boundary", "Outside"]] = None


class DefinitenessModel(BaseModel):
    label: Literal["CondPositiveDefinite", "CondNegativeDefinite", "CondSemidefinite", "CondIndefinite"]
    eigenvalues: List[float]


class DirichletModel(BaseModel):
    alpha: List[float]
    gamma: float
    mean: List[float]
    variance: List[float]
    cross_moments: List[List[float]]
    density_certificate: Optional[str] = None


class AnalysisReport(BaseModel):
    n: int
    interpretation: Literal["ito", "stratonovich"]
    effective_payoff: List[List[float]]
    modified_payoff: List[List[float]]
    equalizer: EqualizerModel
    interior_nash: Optional[List[float]] = None
    interior_nash_unique: bool
    pure_nash: List[int]
    strict_pure_nash: List[int]
    definiteness: DefinitenessModel
    gamma: Optional[float] = None
    dirichlet: Optional[DirichletModel] = None
    second_density: Dict[str, Any]
    dominated: Dict[str, Dict[str, Any]]
    separating_direction: Optional[Dict[str, Any]] = None


class CertificateModel(BaseModel):
    rule: str
    witness: Dict[str, Any]
    supporting: List[str] = []
    notes: List[str] = []


class ClassificationReportModel(BaseModel):
    label: Literal["PositiveRecurrent", "NullRecurrent", "ConjecturedNullRecurrent",
                   "Transient", "NotPositiveRecurrent", "Unknown"]
    certificate: CertificateModel
    stable_vertices: List[int]
    vanishing_strategies: List[int]
    diagnostics: Dict[str, Any]
    vertex_stability: Optional[Dict[str, Dict[str, Any]]] = None


class CooccurrenceModel(BaseModel):
    p: List[List[float]]
    marginals: List[float]


class BoundaryModel(BaseModel):
    min_final: float
    log_slope: List[float]


class EstimatorReport(BaseModel):
    t_final: float
    burn_in: float
    points: int
    time_average: List[float]
    cooccurrence: CooccurrenceModel
    hannan_residuals: List[float]
    boundary: BoundaryModel
    timescale: Optional[Dict[str, Any]] = None
    dirichlet_check: Optional[Dict[str, Any]] = None
    config: Optional[Dict[str, Any]] = None


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None
    detail: str = ""


class VerificationReport(BaseModel):
    label: str
    runs: int
    t_final: float
    seed_base: int
    checks: List[CheckResult]
    passed: bool


class RunManifestModel(BaseModel):
    command: Literal["analyze", "classify", "simulate", "verify"]
    game_file: Optional[str] = None
    game: GameSpec
    config: Dict[str, Any]
    seeds: List[int] = []
    tool_version: str
    timestamp: str
    outputs: List[str] = []


SCHEMAS = {
    "game": GameSpec,
    "analysis": AnalysisReport,
    "classification": ClassificationReportModel,
    "estimators": EstimatorReport,
    "verification": VerificationReport,
    "manifest": RunManifestModel,
}


def schema_for(name: str) -> Dict[str, Any]:
    if name not in SCHEMAS:
        raise KeyError(name)
    return SCHEMAS[name].model_json_schema()
