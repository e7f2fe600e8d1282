# replicator/classify.py - Long-run classification of the stochastic replicator process
"""
Every rule below inspects the modified game and, when it applies, produces a
Finding (label, rule id, witness). Rules are evaluated in a fixed order; the
first finding gives the label, except that a NotPositiveRecurrent finding is
tentative and gives way to a later NullRecurrent or ConjecturedNullRecurrent
one. All other applicable findings are listed as supporting rules or, when
their label contradicts the chosen one, as conflicts in the diagnostics.

Rule ids:
    no_equalizer_in_simplex          separating direction c with c^T A x > 0 on the simplex
    second_invariant_density         zero-sum condition with a beta giving a second density
    conditionally_positive_definite_low_dim   definite game with n in {2, 3}
    conditionally_positive_definite  definite game with a non-vertex equalizer
    line_of_equilibria               interior equalizers form a line, no positive recurrence
    dirichlet_invariant_law          gamma condition, gamma > 0, interior Nash equilibrium
    gamma_condition_transient        gamma condition plus one of the transience clauses
    gamma_condition_no_dirichlet     gamma condition without (gamma > 0 and interior Nash)
    zero_sum_up_to_column_shift      modified game is zero-sum after column shifts
    two_strategy_coexistence | two_strategy_bistable | two_strategy_dominance | two_strategy_boundary_tie
    neutral_cycle_conjecture         zero-sum, equal noise, unique interior Nash, no second density
    constant_column                  a column of the modified game is constant
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from config import NUMERIC_TOL
from replicator import analysis
from replicator.analysis import (
    DefinitenessLabel,
    EqualizerKind,
    SimplexLocation,
    prescale,
)
from replicator.game_model import Game, ModifiedGame, effective_payoff, modified_game

logger = logging.getLogger("replicator.classify")


class Label(str, Enum):
    POSITIVE_RECURRENT = "PositiveRecurrent"
    NULL_RECURRENT = "NullRecurrent"
    CONJECTURED_NULL_RECURRENT = "ConjecturedNullRecurrent"
    TRANSIENT = "Transient"
    NOT_POSITIVE_RECURRENT = "NotPositiveRecurrent"
    UNKNOWN = "Unknown"


# witness keys holding strategy indices (0-based in Python, 1-based in JSON)
INDEX_KEYS = {"strict_pure_nash", "support", "constant_columns", "tied_strategies"}


@dataclass(frozen=True)
class Finding:
    label: Label
    rule: str
    witness: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class Certificate:
    rule: str
    witness: Dict[str, Any]
    supporting: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class ClassificationReport:
    label: Label
    certificate: Certificate
    stable_vertices: List[int]
    vanishing_strategies: List[int]
    diagnostics: Dict[str, Any]

    def to_dict(self) -> dict:
        return {
            "label": self.label.value,
            "certificate": {
                "rule": self.certificate.rule,
                "witness": _jsonable(self.certificate.witness),
                "supporting": list(self.certificate.supporting),
                "notes": list(self.certificate.notes),
            },
            "stable_vertices": [k + 1 for k in self.stable_vertices],
            "vanishing_strategies": [k + 1 for k in self.vanishing_strategies],
            "diagnostics": _jsonable(self.diagnostics),
        }


def _jsonable(value: Any, key: Optional[str] = None) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v, str(k)) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (list, tuple)):
        if key in INDEX_KEYS:
            return [int(v) + 1 for v in value]
        return [_jsonable(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.generic):
        return value.item()
    return value


# ================================
# Facts shared by the rules
# ================================

@dataclass
class _Facts:
    game: Game
    mg: ModifiedGame
    tol: float
    scaled: np.ndarray
    equalizer: analysis.EqualizerResult
    separation: Optional[analysis.Separation]
    definiteness: analysis.Definiteness
    gamma: Optional[float]
    nash: analysis.InteriorNash
    second_density: analysis.Corollary312Report
    strict_nash: List[int]
    dominated: Dict[int, analysis.Domination]
    constant_columns: List[int]
    skew: bool

    @property
    def n(self) -> int:
        return self.game.n

    def non_vertex_equalizer(self, in_simplex: bool = False) -> Optional[np.ndarray]:
        eq = self.equalizer
        if eq.kind is EqualizerKind.EMPTY:
            return None
        if in_simplex:
            candidates = [] if eq.simplex_point is None else [eq.simplex_point]
        else:
            candidates = [eq.point]
            if eq.kind is EqualizerKind.AFFINE_SUBSPACE:
                candidates.append(eq.point + eq.basis[0])
        for p in candidates:
            if not _is_vertex(p, self.tol):
                return p
        return None


def _is_vertex(p: np.ndarray, tol: float) -> bool:
    k = int(np.argmax(p))
    e = np.zeros_like(p)
    e[k] = 1.0
    return bool(np.abs(p - e).max() <= tol)


def _gather(game: Game, tol: float) -> _Facts:
    mg = modified_game(game)
    scaled, _ = prescale(mg.atilde)
    return _Facts(
        game=game,
        mg=mg,
        tol=tol,
        scaled=scaled,
        equalizer=analysis.equalizer_set(mg, tol),
        separation=analysis.separating_direction(mg, tol),
        definiteness=analysis.conditional_definiteness(mg.atilde, tol),
        gamma=analysis.check_condition_33(game, tol),
        nash=analysis.interior_nash(mg, tol),
        second_density=analysis.corollary_312_analysis(game, tol),
        strict_nash=analysis.strict_pure_nash(mg, tol),
        dominated=analysis.dominated_strategies(mg, tol),
        constant_columns=analysis.constant_columns(mg, tol),
        skew=analysis.is_skew_symmetric(mg, tol),
    )


# ================================
# Rules, in precedence order
# ================================

def _rule_exclusion(f: _Facts) -> Optional[Finding]:
    if f.separation is None:
        return None
    notes = []
    if f.definiteness.label is DefinitenessLabel.POSITIVE and f.equalizer.kind is EqualizerKind.UNIQUE_POINT:
        notes.append("definite game whose equalizer lies outside the simplex")
    return Finding(Label.TRANSIENT, "no_equalizer_in_simplex", {
        "c": f.separation.c,
        "margin": f.separation.margin,
        "equalizer_kind": f.equalizer.kind,
    }, notes)


def _rule_second_density(f: _Facts) -> Optional[Finding]:
    report = f.second_density
    if not report.transient:
        return None
    return Finding(Label.TRANSIENT, "second_invariant_density", {
        "beta": report.beta,
        "c": report.c,
        "second_alpha": report.second_alpha,
    })


def _rule_definite(f: _Facts) -> Optional[Finding]:
    if f.definiteness.label is not DefinitenessLabel.POSITIVE:
        return None
    p = f.non_vertex_equalizer()
    witness: Dict[str, Any] = {"eigenvalues": f.definiteness.eigenvalues}
    if p is not None:
        witness["equalizer_point"] = p
        witness["support"] = [i for i in range(f.n) if p[i] > f.tol]
    notes = []
    if not f.constant_columns:
        notes.append("no column of the modified game is constant: transient")
    if p is not None and f.equalizer.in_simplex is SimplexLocation.OUTSIDE:
        notes.append("equalizer outside the simplex: exclusion principle applies as well")
    if f.n <= 3:
        witness["strict_pure_nash"] = f.strict_nash
        return Finding(Label.TRANSIENT, "conditionally_positive_definite_low_dim", witness, notes)
    if p is None:
        return None
    return Finding(Label.TRANSIENT, "conditionally_positive_definite", witness, notes)


def _rule_line_of_equilibria(f: _Facts) -> Optional[Finding]:
    eq = f.equalizer
    if eq.kind is not EqualizerKind.AFFINE_SUBSPACE or eq.in_simplex is not SimplexLocation.INTERIOR:
        return None
    return Finding(Label.NOT_POSITIVE_RECURRENT, "line_of_equilibria", {
        "equalizer_point": eq.simplex_point,
        "directions": eq.basis,
    })


def _rule_gamma(f: _Facts) -> Optional[Finding]:
    gamma = f.gamma
    if gamma is None:
        return None
    if f.nash.point is not None and f.nash.unique and gamma > f.tol:
        params = analysis.DirichletParams(gamma * f.nash.point.x)
        mean, var = analysis.dirichlet_moments(params)
        return Finding(Label.POSITIVE_RECURRENT, "dirichlet_invariant_law", {
            "gamma": gamma,
            "equalizer_point": f.nash.point.x,
            "alpha": params.alpha,
            "dirichlet_mean": mean,
            "dirichlet_variance": var,
        })

    in_simplex = f.equalizer.meets_simplex
    clause = None
    if gamma < -f.tol and f.n <= 3:
        clause = "i"
    elif gamma < -f.tol and f.non_vertex_equalizer(in_simplex=True) is not None:
        clause = "ii"
    elif not in_simplex:
        clause = "iii"
    if clause is not None:
        return Finding(Label.TRANSIENT, "gamma_condition_transient", {"gamma": gamma, "clause": clause})
    return Finding(Label.NOT_POSITIVE_RECURRENT, "gamma_condition_no_dirichlet", {
        "gamma": gamma,
        "interior_nash": None if f.nash.point is None else f.nash.point.x,
    })


def _rule_zero_sum(f: _Facts) -> Optional[Finding]:
    if not f.second_density.has_310:
        return None
    return Finding(Label.NOT_POSITIVE_RECURRENT, "zero_sum_up_to_column_shift", {
        "exactly_skew": f.skew,
        "second_density": f.second_density.transient,
    })


TWO_STRATEGY_LABELS = {
    "coexistence": Label.POSITIVE_RECURRENT,
    "bistable": Label.TRANSIENT,
    "dominance": Label.TRANSIENT,
    "boundary_tie": Label.NULL_RECURRENT,
}


def _two_strategy_case(scaled: np.ndarray, tol: float) -> Optional[str]:
    """Sign pattern of d1 = a11 - a21 and d2 = a22 - a12 on the prescaled modified game."""
    d1 = scaled[0, 0] - scaled[1, 0]
    d2 = scaled[1, 1] - scaled[0, 1]
    s1 = 0 if abs(d1) <= tol else int(np.sign(d1))
    s2 = 0 if abs(d2) <= tol else int(np.sign(d2))
    if s1 < 0 and s2 < 0:
        return "coexistence"
    if s1 > 0 and s2 > 0:
        return "bistable"
    if s1 * s2 < 0:
        return "dominance"
    if (s1 == 0 and s2 < 0) or (s2 == 0 and s1 < 0):
        return "boundary_tie"
    return None


def _rule_two_strategies(f: _Facts) -> Optional[Finding]:
    if f.n != 2:
        return None
    case = _two_strategy_case(f.scaled, f.tol)
    if case is None:
        return None
    at = f.mg.atilde
    witness = {"d1": float(at[0, 0] - at[1, 0]), "d2": float(at[1, 1] - at[0, 1])}
    return Finding(TWO_STRATEGY_LABELS[case], f"two_strategy_{case}", witness)


def _equal_noise(sigma: np.ndarray, tol: float) -> bool:
    return bool(np.ptp(sigma) <= tol * max(1.0, float(sigma.max())))


def _rule_neutral_cycle(f: _Facts) -> Optional[Finding]:
    equal_noise = _equal_noise(f.game.sigma, f.tol)
    if not (f.second_density.has_310 and equal_noise and f.nash.point is not None and f.nash.unique):
        return None
    if f.second_density.transient:
        return None
    return Finding(Label.CONJECTURED_NULL_RECURRENT, "neutral_cycle_conjecture", {
        "interior_nash": f.nash.point.x,
    })


def _rule_constant_column(f: _Facts) -> Optional[Finding]:
    if not f.constant_columns:
        return None
    return Finding(Label.NOT_POSITIVE_RECURRENT, "constant_column", {"constant_columns": f.constant_columns})


RULES: List[Callable[[_Facts], Optional[Finding]]] = [
    _rule_exclusion,
    _rule_second_density,
    _rule_definite,
    _rule_line_of_equilibria,
    _rule_gamma,
    _rule_zero_sum,
    _rule_two_strategies,
    _rule_neutral_cycle,
    _rule_constant_column,
]

REFINING = {Label.NULL_RECURRENT, Label.CONJECTURED_NULL_RECURRENT}
NOT_PR_COMPATIBLE = {Label.TRANSIENT, Label.NULL_RECURRENT, Label.CONJECTURED_NULL_RECURRENT,
                     Label.NOT_POSITIVE_RECURRENT}


def _compatible(chosen: Label, other: Label) -> bool:
    if chosen == other:
        return True
    return other is Label.NOT_POSITIVE_RECURRENT and chosen in NOT_PR_COMPATIBLE


def _resolve(findings: List[Finding]):
    chosen: Optional[Finding] = None
    for finding in findings:
        if chosen is None:
            chosen = finding
        elif chosen.label is Label.NOT_POSITIVE_RECURRENT and finding.label in REFINING:
            chosen = finding
    others = [x for x in findings if x is not chosen]
    supporting = [x.rule for x in others if _compatible(chosen.label, x.label)] if chosen else []
    conflicts = [f"{x.rule}:{x.label.value}" for x in others if chosen and not _compatible(chosen.label, x.label)]
    return chosen, supporting, conflicts


# ================================
# Certificate checks
# ================================

def _check_separation(game: Game, mg: ModifiedGame, w: Dict[str, Any], tol: float) -> bool:
    at = mg.atilde
    ref = max(1.0, float(np.abs(at).max()))
    c = np.asarray(w["c"], dtype=float)
    return bool(abs(c.sum()) <= tol * ref and np.all(c @ at > 0))


def _check_second_density(game: Game, mg: ModifiedGame, w: Dict[str, Any], tol: float) -> bool:
    at = mg.atilde
    ref = max(1.0, float(np.abs(at).max()))
    beta = np.asarray(w["beta"], dtype=float)
    payoffs = at @ beta
    return bool(
        analysis.has_condition_310(game, tol)
        and abs(beta.sum()) <= 1e-9
        and np.ptp(payoffs) <= 1e-9 * ref
        and np.abs(beta @ at).max() > tol * ref
    )


def _check_definite(game: Game, mg: ModifiedGame, w: Dict[str, Any], tol: float) -> bool:
    if not np.all(np.asarray(w["eigenvalues"], dtype=float) > 0):
        return False
    return analysis.conditional_definiteness(mg.atilde, tol).label is DefinitenessLabel.POSITIVE


def _check_line(game: Game, mg: ModifiedGame, w: Dict[str, Any], tol: float) -> bool:
    eq = analysis.equalizer_set(mg, tol)
    return eq.kind is EqualizerKind.AFFINE_SUBSPACE and eq.in_simplex is SimplexLocation.INTERIOR


def _check_dirichlet(game: Game, mg: ModifiedGame, w: Dict[str, Any], tol: float) -> bool:
    params = analysis.dirichlet_invariant(game, tol)
    if params is None:
        return False
    return bool(np.allclose(params.alpha, np.asarray(w["alpha"], dtype=float), rtol=1e-9, atol=tol))


def _check_gamma_transient(game: Game, mg: ModifiedGame, w: Dict[str, Any], tol: float) -> bool:
    gamma = float(w["gamma"])
    if not analysis.satisfies_condition_33(game, gamma, tol):
        return False
    clause = w.get("clause")
    if clause == "i":
        return gamma < -tol and game.n <= 3
    eq = analysis.equalizer_set(mg, tol)
    if clause == "ii":
        return gamma < -tol and eq.simplex_point is not None and not _is_vertex(eq.simplex_point, tol)
    if clause == "iii":
        return not eq.meets_simplex
    return False


def _check_gamma_no_dirichlet(game: Game, mg: ModifiedGame, w: Dict[str, Any], tol: float) -> bool:
    return bool(
        analysis.satisfies_condition_33(game, float(w["gamma"]), tol)
        and analysis.dirichlet_invariant(game, tol) is None
    )


def _check_zero_sum(game: Game, mg: ModifiedGame, w: Dict[str, Any], tol: float) -> bool:
    return analysis.has_condition_310(game, tol)


def _check_neutral_cycle(game: Game, mg: ModifiedGame, w: Dict[str, Any], tol: float) -> bool:
    nash = analysis.interior_nash(mg, tol)
    report = analysis.corollary_312_analysis(game, tol)
    return bool(
        report.has_310 and not report.transient
        and _equal_noise(game.sigma, tol)
        and nash.point is not None and nash.unique
    )


def _check_constant_column(game: Game, mg: ModifiedGame, w: Dict[str, Any], tol: float) -> bool:
    claimed = list(w["constant_columns"])
    return bool(claimed) and set(claimed) <= set(analysis.constant_columns(mg, tol))


CERTIFICATE_CHECKS: Dict[str, Callable[[Game, ModifiedGame, Dict[str, Any], float], bool]] = {
    "no_equalizer_in_simplex": _check_separation,
    "second_invariant_density": _check_second_density,
    "conditionally_positive_definite_low_dim": _check_definite,
    "conditionally_positive_definite": _check_definite,
    "line_of_equilibria": _check_line,
    "dirichlet_invariant_law": _check_dirichlet,
    "gamma_condition_transient": _check_gamma_transient,
    "gamma_condition_no_dirichlet": _check_gamma_no_dirichlet,
    "zero_sum_up_to_column_shift": _check_zero_sum,
    "neutral_cycle_conjecture": _check_neutral_cycle,
    "constant_column": _check_constant_column,
}


def check_certificate(game: Game, certificate: Certificate, tol: float = NUMERIC_TOL) -> bool:
    """Re-derive a certificate from the game; unrecognized rules never pass."""
    rule = certificate.rule
    if rule == "no_rule":
        return True  # Unknown claims nothing
    mg = modified_game(game)
    if rule.startswith("two_strategy_"):
        if game.n != 2:
            return False
        scaled, _ = prescale(mg.atilde)
        return f"two_strategy_{_two_strategy_case(scaled, tol)}" == rule
    check = CERTIFICATE_CHECKS.get(rule)
    if check is None:
        logger.warning("check_certificate: no re-check for rule %r", rule)
        return False
    return bool(check(game, mg, certificate.witness, tol))


# ================================
# Public operations
# ================================

def classify(game: Game, tol: float = NUMERIC_TOL) -> ClassificationReport:
    facts = _gather(game, tol)
    findings = [finding for rule in RULES if (finding := rule(facts)) is not None]
    chosen, supporting, conflicts = _resolve(findings)
    if chosen is None:
        chosen = Finding(Label.UNKNOWN, "no_rule")
    logger.debug("classify: %s via %s (supporting: %s)", chosen.label.value, chosen.rule, supporting)

    certificate = Certificate(rule=chosen.rule, witness=chosen.witness,
                              supporting=supporting, notes=list(chosen.notes))
    diagnostics = _diagnostics(facts)
    diagnostics["conflicts"] = conflicts
    diagnostics["certificate_checked"] = check_certificate(game, certificate, tol)
    return ClassificationReport(
        label=chosen.label,
        certificate=certificate,
        stable_vertices=list(facts.strict_nash),
        vanishing_strategies=sorted(facts.dominated),
        diagnostics=diagnostics,
    )


def _diagnostics(f: _Facts) -> Dict[str, Any]:
    eq = f.equalizer
    return {
        "modified_payoff": f.mg.atilde,
        "equalizer": {
            "kind": eq.kind,
            "point": eq.point,
            "in_simplex": eq.in_simplex,
        },
        "definiteness": {"label": f.definiteness.label, "eigenvalues": f.definiteness.eigenvalues},
        "gamma": f.gamma,
        "interior_nash": None if f.nash.point is None else f.nash.point.x,
        "interior_nash_unique": f.nash.unique,
        "zero_sum_up_to_column_shift": f.second_density.has_310,
        "skew_symmetric": f.skew,
        "strict_pure_nash": f.strict_nash,
        "constant_columns": f.constant_columns,
        "dominated": {str(k + 1): {"q": d.q, "margin": d.margin} for k, d in f.dominated.items()},
    }


# ================================
# Stability of pure states
# ================================

class StabilityVerdict(str, Enum):
    STABLE = "StrictNE_Stable"
    UNSTABLE = "NotNash_Unstable"
    BOUNDARY = "BoundaryCase"


@dataclass(frozen=True)
class VertexStability:
    verdict: StabilityVerdict
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "notes": list(self.notes)}


def stability_of_vertex(game: Game, k: int, tol: float = NUMERIC_TOL) -> VertexStability:
    n = game.n
    if not 0 <= k < n:
        raise IndexError(f"strategy index {k} out of range for n={n}")
    a, _ = prescale(modified_game(game).atilde)
    others = [j for j in range(n) if j != k]
    margins = np.array([a[k, k] - a[j, k] for j in others])

    if np.all(margins > tol):
        raw = effective_payoff(game)
        s2 = game.sigma[k] ** 2
        stronger = all(raw[k, k] > raw[j, k] + s2 for j in others)
        note = "older noise condition a_kk > a_jk + sigma_k^2 also holds" if stronger \
            else "older noise condition a_kk > a_jk + sigma_k^2 fails"
        return VertexStability(StabilityVerdict.STABLE, [note])
    if np.any(margins < -tol):
        return VertexStability(StabilityVerdict.UNSTABLE,
                               ["convergence to this vertex has probability 0"])

    notes = []
    if n == 2:
        notes.append("not stable: for two strategies stability requires a strict equilibrium")
    ties = [j for j, m in zip(others, margins) if abs(m) <= tol]
    for i in ties:
        if not any(a[i, j] < a[k, j] - tol for j in others):
            notes.append(f"positive-probability convergence impossible (tie with strategy {i + 1})")
            break
    return VertexStability(StabilityVerdict.BOUNDARY, notes)
