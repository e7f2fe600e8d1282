# replicator/analysis.py - Static analysis of the modified game
"""
Equalizer sets, Nash equilibria, conditional definiteness, the gamma
condition on payoff/noise pairs, Dirichlet invariant laws, domination and
separation certificates.

Every numerical decision is taken on the payoff matrix pre-scaled so that
max|a_ij| lies in [1, 10); witnesses are reported in the original units.
Strategy indices are 0-based.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.linalg import null_space
from scipy.stats import dirichlet

from config import NUMERIC_TOL, PRESCALE_HIGH, PRESCALE_LOW, RANK_RCOND
from replicator.game_model import Game, ModifiedGame, SimplexPoint, effective_payoff, modified_game
from replicator.lp_solver import linprog_dense

logger = logging.getLogger("replicator.analysis")


def prescale(matrix: np.ndarray) -> Tuple[np.ndarray, float]:
    """Return (matrix / scale, scale) with scale a power of ten and max|entry| in [1, 10)."""
    matrix = np.asarray(matrix, dtype=float)
    peak = np.abs(matrix).max(initial=0.0)
    if peak == 0.0:
        return matrix.copy(), 1.0
    scale = 10.0 ** np.floor(np.log10(peak))
    scaled = matrix / scale
    # guard the rounding edge of log10
    top = np.abs(scaled).max()
    if top >= PRESCALE_HIGH:
        scale *= 10.0
    elif top < PRESCALE_LOW:
        scale /= 10.0
    return matrix / scale, scale


def _spread(v: np.ndarray) -> float:
    return float(np.max(v) - np.min(v)) if v.size else 0.0


# ================================
# Equalizer set
# ================================

class EqualizerKind(str, Enum):
    EMPTY = "Empty"
    UNIQUE_POINT = "UniquePoint"
    AFFINE_SUBSPACE = "AffineSubspace"


class SimplexLocation(str, Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class EqualizerResult:
    """Solution set of {y : (Ay)_1 = ... = (Ay)_n, sum(y) = 1}."""
    kind: EqualizerKind
    point: Optional[np.ndarray] = None          # the point, or a particular solution of the affine set
    basis: Optional[np.ndarray] = None          # rows span the directions of the affine set
    in_simplex: Optional[SimplexLocation] = None
    simplex_point: Optional[np.ndarray] = None  # a point of the set inside the simplex, if any

    @property
    def meets_simplex(self) -> bool:
        return self.in_simplex in (SimplexLocation.INTERIOR, SimplexLocation.BOUNDARY)

    def distance(self, y: np.ndarray) -> float:
        """Euclidean distance from y to the affine solution set."""
        y = np.asarray(y, dtype=float)
        if self.kind is EqualizerKind.EMPTY:
            return float("inf")
        d = y - self.point
        if self.kind is EqualizerKind.AFFINE_SUBSPACE:
            d = d - self.basis.T @ (self.basis @ d)
        return float(np.linalg.norm(d))


def _locate(p: np.ndarray, tol: float) -> SimplexLocation:
    if np.all(p > tol):
        return SimplexLocation.INTERIOR
    if np.all(p >= -tol):
        return SimplexLocation.BOUNDARY
    return SimplexLocation.OUTSIDE


def _maximin_on_affine(y0: np.ndarray, directions: np.ndarray) -> Tuple[float, np.ndarray]:
    """max s such that y0 + D^T t >= s for some t (the set already sums to one)."""
    n, k = y0.size, directions.shape[0]
    # variables: t+ (k), t- (k), s+, s-
    c = np.zeros(2 * k + 2)
    c[2 * k], c[2 * k + 1] = -1.0, 1.0
    A_ub = np.zeros((n + 1, 2 * k + 2))
    A_ub[:n, :k] = -directions.T
    A_ub[:n, k:2 * k] = directions.T
    A_ub[:n, 2 * k] = 1.0
    A_ub[:n, 2 * k + 1] = -1.0
    A_ub[n, 2 * k], A_ub[n, 2 * k + 1] = 1.0, -1.0
    b_ub = np.concatenate([y0, [1.0]])
    res = linprog_dense(c, A_ub, b_ub)
    t = res.x[:k] - res.x[k:2 * k]
    return -res.fun, y0 + directions.T @ t


def equalizer_set(game: ModifiedGame, tol: float = NUMERIC_TOL) -> EqualizerResult:
    a, _ = prescale(game.atilde)
    n = game.n
    system = np.vstack([a[:-1] - a[-1], np.ones(n)])
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    null = null_space(system, rcond=RANK_RCOND)
    if null.shape[1] == 0:
        p = np.linalg.solve(system, rhs)
        location = _locate(p, tol)
        return EqualizerResult(
            kind=EqualizerKind.UNIQUE_POINT,
            point=p,
            in_simplex=location,
            simplex_point=p if location is not SimplexLocation.OUTSIDE else None,
        )

    y0 = np.linalg.lstsq(system, rhs, rcond=RANK_RCOND)[0]
    if np.abs(system @ y0 - rhs).max() > tol:
        return EqualizerResult(kind=EqualizerKind.EMPTY)
    basis = null.T
    margin, witness = _maximin_on_affine(y0, basis)
    if margin > tol:
        location = SimplexLocation.INTERIOR
    elif margin >= -tol:
        location = SimplexLocation.BOUNDARY
    else:
        location = SimplexLocation.OUTSIDE
    return EqualizerResult(
        kind=EqualizerKind.AFFINE_SUBSPACE,
        point=y0,
        basis=basis,
        in_simplex=location,
        simplex_point=np.clip(witness, 0.0, None) if location is not SimplexLocation.OUTSIDE else None,
    )


# ================================
# Nash equilibria
# ================================

class InteriorNash(NamedTuple):
    point: Optional[SimplexPoint]
    unique: bool


def interior_nash(game: ModifiedGame, tol: float = NUMERIC_TOL) -> InteriorNash:
    """Interior Nash equilibria are exactly the interior equalizers."""
    eq = equalizer_set(game, tol)
    if eq.in_simplex is not SimplexLocation.INTERIOR:
        return InteriorNash(None, False)
    point = SimplexPoint.from_weights(eq.simplex_point)
    return InteriorNash(point, eq.kind is EqualizerKind.UNIQUE_POINT)


def is_nash(game: ModifiedGame, p: SimplexPoint, tol: float = NUMERIC_TOL) -> bool:
    a, _ = prescale(game.atilde)
    payoffs = a @ p.x
    return bool(np.all(p.x @ payoffs >= payoffs - tol))


def strict_pure_nash(game: ModifiedGame, tol: float = NUMERIC_TOL) -> List[int]:
    a, _ = prescale(game.atilde)
    strict = []
    for k in range(game.n):
        others = np.delete(a[:, k], k)
        if np.all(a[k, k] > others + tol):
            strict.append(k)
    return strict


def constant_columns(game: ModifiedGame, tol: float = NUMERIC_TOL) -> List[int]:
    """Columns of the modified game proportional to the all-ones vector."""
    a, _ = prescale(game.atilde)
    return [k for k in range(game.n) if _spread(a[:, k]) <= tol]


def is_skew_symmetric(game: ModifiedGame, tol: float = NUMERIC_TOL) -> bool:
    a, _ = prescale(game.atilde)
    return bool(np.abs(a + a.T).max() <= tol)


# ================================
# Conditional definiteness
# ================================

class DefinitenessLabel(str, Enum):
    POSITIVE = "CondPositiveDefinite"
    NEGATIVE = "CondNegativeDefinite"
    SEMIDEFINITE = "CondSemidefinite"
    INDEFINITE = "CondIndefinite"


@dataclass(frozen=True)
class Definiteness:
    label: DefinitenessLabel
    eigenvalues: np.ndarray


def zero_sum_basis(n: int) -> np.ndarray:
    """Orthonormal basis (as columns) of the hyperplane sum(y) = 0."""
    return null_space(np.ones((1, n)))


def conditional_definiteness(matrix: np.ndarray, tol: float = NUMERIC_TOL) -> Definiteness:
    scaled, scale = prescale(matrix)
    sym = 0.5 * (scaled + scaled.T)
    q = zero_sum_basis(scaled.shape[0])
    eigenvalues = np.linalg.eigvalsh(q.T @ sym @ q)
    if np.all(eigenvalues > tol):
        label = DefinitenessLabel.POSITIVE
    elif np.all(eigenvalues < -tol):
        label = DefinitenessLabel.NEGATIVE
    elif np.any(eigenvalues > tol) and np.any(eigenvalues < -tol):
        label = DefinitenessLabel.INDEFINITE
    else:
        label = DefinitenessLabel.SEMIDEFINITE
    return Definiteness(label, eigenvalues * scale)


# ================================
# The gamma condition and Dirichlet laws
# ================================

def _pairwise_gammas(game: Game) -> np.ndarray:
    a = effective_payoff(game)
    s2 = game.sigma ** 2
    n = game.n
    return np.array([
        2.0 * (a[i, j] + a[j, i] - a[i, i] - a[j, j]) / (s2[i] + s2[j])
        for i in range(n) for j in range(i + 1, n)
    ])


def check_condition_33(game: Game, tol: float = NUMERIC_TOL) -> Optional[float]:
    """Common gamma with a_ij + a_ji - a_ii - a_jj = (gamma/2)(sigma_i^2 + sigma_j^2), if any."""
    gammas = _pairwise_gammas(game)
    if game.n == 2:
        return float(gammas[0])
    gamma = float(np.mean(gammas))
    if _spread(gammas) <= tol * (1.0 + abs(gamma)):
        return gamma
    return None


def satisfies_condition_33(game: Game, gamma: float, tol: float = NUMERIC_TOL) -> bool:
    gammas = _pairwise_gammas(game)
    return bool(np.all(np.abs(gammas - gamma) <= tol * (1.0 + abs(gamma))))


def has_condition_310(game: Game, tol: float = NUMERIC_TOL) -> bool:
    """a_ij + a_ji - a_ii - a_jj = 0 for all i, j."""
    a, _ = prescale(effective_payoff(game))
    d = np.diag(a)
    return bool(np.abs(a + a.T - d[:, None] - d[None, :]).max() <= tol)


@dataclass(frozen=True)
class DirichletParams:
    alpha: np.ndarray

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float)
        if alpha.ndim != 1 or np.any(~np.isfinite(alpha)) or np.any(alpha <= 0):
            raise ValueError("alpha_i > 0 for all i")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @property
    def gamma(self) -> float:
        return float(self.alpha.sum())


def dirichlet_invariant(game: Game, tol: float = NUMERIC_TOL) -> Optional[DirichletParams]:
    gamma = check_condition_33(game, tol)
    if gamma is None or gamma <= tol:
        return None
    nash = interior_nash(modified_game(game), tol)
    if nash.point is None or not nash.unique:
        return None
    return DirichletParams(gamma * nash.point.x)


def dirichlet_moments(params: DirichletParams) -> Tuple[np.ndarray, np.ndarray]:
    """Mean alpha/gamma and variance alpha(gamma - alpha)/(gamma^2 (gamma + 1))."""
    return dirichlet.mean(params.alpha), dirichlet.var(params.alpha)


def dirichlet_cross_moments(params: DirichletParams) -> np.ndarray:
    """E[U_i U_j]: the co-occurrence matrix of a process with this invariant law."""
    alpha, gamma = params.alpha, params.gamma
    second = np.outer(alpha, alpha) + np.diag(alpha)
    return second / (gamma * (gamma + 1.0))


def matching_cooccurrence_closed_form(sigma: float) -> np.ndarray:
    """Limit matrix for A = [[0, 1], [1, 0]] with sigma_1 = sigma_2 = sigma."""
    off = 1.0 / (4.0 + 2.0 * sigma ** 2)
    return np.array([[0.5 - off, off], [off, 0.5 - off]])


# ================================
# Invariant density certificates
# ================================

class DensityCertificate(NamedTuple):
    holds: bool
    clause: Optional[str]  # "a" or "b"


def theorem_36_certificate(game: Game, alpha: np.ndarray, tol: float = NUMERIC_TOL) -> DensityCertificate:
    """Is prod x_i^(alpha_i - 1) an invariant density on the interior of the simplex?"""
    alpha = np.asarray(alpha, dtype=float)
    mg = modified_game(game)
    at = mg.atilde
    s2 = game.sigma ** 2
    gamma = float(alpha.sum())
    ref = max(1.0, np.abs(at).max()) * max(1.0, np.abs(alpha).max())
    quad = 0.5 * float(np.sum(s2 * alpha ** 2))

    if abs(gamma + 1.0) > tol and satisfies_condition_33(game, gamma, tol):
        payoffs = at @ alpha
        if _spread(payoffs) <= tol * ref:
            if abs(gamma) > tol:
                return DensityCertificate(True, "a")
            target = float(np.diag(at) @ alpha) - quad
            if abs(payoffs[0] - target) <= tol * ref * max(1.0, abs(target)):
                return DensityCertificate(True, "a")

    if abs(gamma + 1.0) <= tol:
        residual = 0.5 * s2 + quad + alpha * s2 - np.diag(at) - alpha @ at
        if np.abs(residual).max() <= tol * ref * max(1.0, quad):
            return DensityCertificate(True, "b")
    return DensityCertificate(False, None)


@dataclass(frozen=True)
class Corollary312Report:
    has_310: bool
    beta: Optional[np.ndarray] = None
    second_alpha: Optional[np.ndarray] = None
    c: Optional[float] = None
    transient: bool = False


def corollary_312_analysis(game: Game, tol: float = NUMERIC_TOL) -> Corollary312Report:
    if not has_condition_310(game, tol):
        return Corollary312Report(has_310=False)
    mg = modified_game(game)
    a, scale = prescale(mg.atilde)
    n = game.n
    constraints = np.vstack([a[:-1] - a[-1], np.ones(n)])
    candidates = null_space(constraints, rcond=RANK_RCOND)
    if candidates.shape[1] == 0:
        return Corollary312Report(has_310=True)
    row_payoffs = candidates.T @ a                     # beta^T A for each candidate
    norms = np.linalg.norm(row_payoffs, axis=1)
    best = int(np.argmax(norms))
    if norms[best] <= tol:
        return Corollary312Report(has_310=True)

    beta = candidates[:, best]
    beta = beta / np.abs(beta).max()
    lead = np.flatnonzero(np.abs(beta) > tol)[0]
    if beta[lead] < 0:
        beta = -beta
    c = 2.0 * float((beta @ mg.atilde)[0]) / float(np.sum(game.sigma ** 2 * beta ** 2))
    logger.debug("second invariant density: beta=%s c=%.6g", beta, c)
    return Corollary312Report(has_310=True, beta=beta, second_alpha=c * beta, c=c, transient=True)


# ================================
# Domination and separation (linear programs)
# ================================

@dataclass(frozen=True)
class Domination:
    q: np.ndarray       # dominating mixed strategy
    margin: float       # optimal delta in payoff units


@dataclass(frozen=True)
class Separation:
    c: np.ndarray       # sum(c) = 0 and c^T A x >= margin on the simplex
    margin: float


def strictly_dominated(game: ModifiedGame, k: int, tol: float = NUMERIC_TOL) -> Optional[Domination]:
    """Mixed strategy q with (q^T A)_j >= a_kj + delta for all j, delta maximal."""
    a, scale = prescale(game.atilde)
    n = game.n
    # variables: q (n), delta+, delta-
    c = np.zeros(n + 2)
    c[n], c[n + 1] = -1.0, 1.0
    A_ub = np.hstack([-a.T, np.ones((n, 1)), -np.ones((n, 1))])
    b_ub = -a[k]
    A_eq = np.concatenate([np.ones(n), [0.0, 0.0]])[None, :]
    res = linprog_dense(c, A_ub, b_ub, A_eq, np.ones(1))
    if res.status != "optimal":
        return None
    delta = res.x[n] - res.x[n + 1]
    if delta <= tol:
        return None
    q = np.clip(res.x[:n], 0.0, None)
    return Domination(q=q / q.sum(), margin=delta * scale)


def dominated_strategies(game: ModifiedGame, tol: float = NUMERIC_TOL) -> Dict[int, Domination]:
    found = {}
    for k in range(game.n):
        dom = strictly_dominated(game, k, tol)
        if dom is not None:
            found[k] = dom
    return found


def separating_direction(game: ModifiedGame, tol: float = NUMERIC_TOL) -> Optional[Separation]:
    """c with sum(c) = 0, |c_i| <= 1 and min_j (c^T A)_j = delta maximal."""
    a, scale = prescale(game.atilde)
    n = game.n
    # variables: u = c + 1 in [0, 2] (n), delta+, delta-
    cost = np.zeros(n + 2)
    cost[n], cost[n + 1] = -1.0, 1.0
    A_ub = np.vstack([
        np.hstack([-a.T, np.ones((n, 1)), -np.ones((n, 1))]),
        np.hstack([np.eye(n), np.zeros((n, 2))]),
    ])
    b_ub = np.concatenate([-a.sum(axis=0), np.full(n, 2.0)])
    A_eq = np.concatenate([np.ones(n), [0.0, 0.0]])[None, :]
    res = linprog_dense(cost, A_ub, b_ub, A_eq, np.array([float(n)]))
    if res.status != "optimal":
        return None
    delta = res.x[n] - res.x[n + 1]
    if delta <= tol:
        return None
    return Separation(c=res.x[:n] - 1.0, margin=delta * scale)
