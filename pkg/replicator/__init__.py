# replicator - games under aggregate shocks: model, analysis, simulation, estimators, classification
from replicator.game_model import (
    Game,
    Interpretation,
    ModifiedGame,
    SimplexPoint,
    diffusion_matrix,
    drift,
    effective_payoff,
    modified_game,
    relabel,
    scale_noise,
    shift_column,
)
from replicator.classify import ClassificationReport, Label, classify, stability_of_vertex

__all__ = [
    "Game",
    "Interpretation",
    "ModifiedGame",
    "SimplexPoint",
    "diffusion_matrix",
    "drift",
    "effective_payoff",
    "modified_game",
    "relabel",
    "scale_noise",
    "shift_column",
    "ClassificationReport",
    "Label",
    "classify",
    "stability_of_vertex",
]
