# replicator/game_model.py - Games, the modified game and the simplex SDE coefficients
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Union

import numpy as np

from config import SIMPLEX_EPS_FACTOR
from errors import GameValidationError

ArrayLike = Union[Sequence[float], np.ndarray]


class Interpretation(str, Enum):
    ITO = "ito"
    STRATONOVICH = "stratonovich"


def _frozen(values: ArrayLike, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        return arr
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Game:
    """Symmetric two-player game under aggregate shocks.

    payoff[i, j] is the payoff to an i-player against a j-player, sigma[i]
    the noise intensity on strategy i (per unit sqrt(time)).
    """
    payoff: np.ndarray
    sigma: np.ndarray
    interpretation: Interpretation = Interpretation.ITO

    def __post_init__(self):
        try:
            payoff = _frozen(self.payoff, 2)
        except (TypeError, ValueError) as e:
            raise GameValidationError("payoff is square with side n", f"rows are not a numeric matrix: {e}")
        try:
            sigma = _frozen(self.sigma, 1)
        except (TypeError, ValueError) as e:
            raise GameValidationError("sigma has length n", f"not a numeric vector: {e}")
        if payoff.ndim != 2 or payoff.shape[0] != payoff.shape[1]:
            raise GameValidationError("payoff is square with side n", f"got shape {payoff.shape}")
        n = payoff.shape[0]
        if n < 2:
            raise GameValidationError("strategy count n >= 2", f"got n={n}")
        if sigma.ndim != 1 or sigma.shape[0] != n:
            raise GameValidationError("sigma has length n", f"n={n}, got shape {sigma.shape}")
        if not np.all(np.isfinite(payoff)):
            raise GameValidationError("all entries of payoff are finite")
        if not np.all(np.isfinite(sigma)) or np.any(sigma <= 0):
            raise GameValidationError("sigma_i > 0 for every i", f"got {sigma.tolist()}")
        object.__setattr__(self, "payoff", payoff)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "interpretation", Interpretation(self.interpretation))

    @property
    def n(self) -> int:
        return self.payoff.shape[0]

    def to_dict(self) -> dict:
        return {
            "payoff": self.payoff.tolist(),
            "sigma": self.sigma.tolist(),
            "interpretation": self.interpretation.value,
        }


@dataclass(frozen=True)
class ModifiedGame:
    """The game with entries a_ij - sigma_i^2 / 2 that governs long-run behaviour."""
    atilde: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "atilde", _frozen(self.atilde, 2))
        object.__setattr__(self, "sigma", _frozen(self.sigma, 1))

    @property
    def n(self) -> int:
        return self.atilde.shape[0]


@dataclass(frozen=True)
class SimplexPoint:
    """A population state on the probability simplex."""
    x: np.ndarray = field()

    def __post_init__(self):
        x = _frozen(self.x, 1)
        if x.ndim != 1 or x.size < 2:
            raise GameValidationError("simplex point is a vector of length n >= 2")
        tol = SIMPLEX_EPS_FACTOR * x.size * np.finfo(float).eps
        if np.any(~np.isfinite(x)) or np.any(x < 0):
            raise GameValidationError("x_i >= 0 for all i", f"got {x.tolist()}")
        if abs(x.sum() - 1.0) > tol:
            raise GameValidationError("|sum(x) - 1| <= 4n eps", f"sum={x.sum()!r}")
        object.__setattr__(self, "x", x)

    @classmethod
    def from_weights(cls, weights: ArrayLike) -> "SimplexPoint":
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or w.sum() <= 0:
            raise GameValidationError("x_i >= 0 for all i", f"got {w.tolist()}")
        return cls(w / w.sum())

    @classmethod
    def barycenter(cls, n: int) -> "SimplexPoint":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def vertex(cls, n: int, k: int) -> "SimplexPoint":
        e = np.zeros(n)
        e[k] = 1.0
        return cls(e)

    @property
    def interior(self) -> bool:
        return bool(np.all(self.x > 0))

    @property
    def n(self) -> int:
        return self.x.size


def _as_vector(x: Union[SimplexPoint, ArrayLike]) -> np.ndarray:
    return x.x if isinstance(x, SimplexPoint) else np.asarray(x, dtype=float)


# ================================
# Stratonovich bridge and modified game
# ================================

def effective_payoff(game: Game) -> np.ndarray:
    """Itô-form payoff: A itself, or A with sigma_i^2/2 added to row i for Stratonovich games."""
    if game.interpretation is Interpretation.STRATONOVICH:
        return game.payoff + 0.5 * game.sigma[:, None] ** 2
    return game.payoff.copy()


def modified_game(game: Game) -> ModifiedGame:
    atilde = effective_payoff(game) - 0.5 * game.sigma[:, None] ** 2
    return ModifiedGame(atilde=atilde, sigma=game.sigma.copy())


# ================================
# SDE coefficients on the simplex
# ================================

def _projection(x: np.ndarray) -> np.ndarray:
    return np.diag(x) - np.outer(x, x)


def drift(game: Game, x: Union[SimplexPoint, ArrayLike]) -> np.ndarray:
    """b(x) = [diag(x) - x x^T][A - diag(sigma^2)] x."""
    x = _as_vector(x)
    m = effective_payoff(game) - np.diag(game.sigma ** 2)
    return _projection(x) @ (m @ x)


def diffusion_matrix(game: Game, x: Union[SimplexPoint, ArrayLike]) -> np.ndarray:
    """C(x) = [diag(x) - x x^T] diag(sigma)."""
    x = _as_vector(x)
    return _projection(x) * game.sigma[None, :]


# ================================
# Game transformations
# ================================

def shift_column(game: Game, j: int, c: float) -> Game:
    """Add c to every entry of column j; the dynamics are unchanged."""
    if not 0 <= j < game.n:
        raise GameValidationError("valid column index", f"j={j}, n={game.n}")
    payoff = game.payoff.copy()
    payoff[:, j] += c
    return Game(payoff=payoff, sigma=game.sigma, interpretation=game.interpretation)


def relabel(game: Game, perm: Sequence[int]) -> Game:
    """Rename strategies: new strategy i is old strategy perm[i]."""
    perm = np.asarray(perm, dtype=int)
    if sorted(perm.tolist()) != list(range(game.n)):
        raise GameValidationError("permutation of range(n)", f"got {perm.tolist()}")
    return Game(
        payoff=game.payoff[np.ix_(perm, perm)],
        sigma=game.sigma[perm],
        interpretation=game.interpretation,
    )


def scale_noise(game: Game, kappa: float) -> Game:
    """Replace sigma by kappa * sigma."""
    if not kappa > 0:
        raise GameValidationError("sigma_i > 0 for every i", f"kappa={kappa}")
    return Game(payoff=game.payoff, sigma=kappa * game.sigma, interpretation=game.interpretation)
