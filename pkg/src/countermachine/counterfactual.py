"""Counterfactual search: invert a trained model toward a desired consequent.

Given a factual antecedent the model maps to one class, find a nearby
antecedent the model maps to the desired one. The squared gap between the
model output and the desired target value is minimized by simulated
annealing over the free (unlocked) coordinates, starting from the factual,
and the answer is reported with a per-variable increased/decreased/unchanged
breakdown.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._backend import kernels
from .annealing import AnnealConfig, AnnealTrace, minimize
from .errors import DimensionMismatch
from .fuzzy import PEACE, WAR, TskModel, classify, evaluate

# changes smaller than this count as "unchanged" in the delta report
DELTA_EPS = 1e-9

ADDITIVE = "additive"
SUBTRACTIVE = "subtractive"
UNCHANGED = "unchanged"


@dataclass(frozen=True)
class CounterfactualQuery:
    """A factual antecedent, the desired target value, and search policy.

    `free_mask[i]` True means variable i may move. An all-locked query is
    only valid with `allow_no_free=True`; the search then degenerates to
    scoring the factual.
    """

    factual: tuple[float, ...]
    desired_consequent: float
    free_mask: tuple[bool, ...]
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    success_margin: float = 0.1
    allow_no_free: bool = False

    def __post_init__(self):
        object.__setattr__(self, "factual", tuple(float(v) for v in self.factual))
        object.__setattr__(self, "free_mask", tuple(bool(b) for b in self.free_mask))
        for i, v in enumerate(self.factual):
            if not math.isfinite(v) or not 0.0 <= v <= 1.0:
                raise ValueError(f"factual[{i}] must lie in [0, 1], got {v}")
        if not 0.0 <= self.desired_consequent <= 1.0:
            raise ValueError(
                f"desired consequent must lie in [0, 1], got {self.desired_consequent}"
            )
        if len(self.free_mask) != len(self.factual):
            raise ValueError(
                f"free_mask length {len(self.free_mask)} != factual length "
                f"{len(self.factual)}"
            )
        if not 0.0 < self.success_margin < 0.5:
            raise ValueError(
                f"success_margin must lie in (0, 0.5), got {self.success_margin}"
            )
        if not any(self.free_mask) and not self.allow_no_free:
            raise ValueError(
                "all variables locked; pass allow_no_free=True for a no-op query"
            )


@dataclass(frozen=True)
class VariableDelta:
    name: str
    factual: float
    counterfactual: float
    direction: str

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "factual": self.factual,
            "counterfactual": self.counterfactual,
            "direction": self.direction,
        }


@dataclass(frozen=True)
class CounterfactualResult:
    antecedent: tuple[float, ...]
    achieved_y: float
    error: float
    achieved_class: str
    success: bool
    deltas: tuple[VariableDelta, ...]
    trace: AnnealTrace
    no_free_variables: bool = False

    def to_dict(self) -> dict:
        return {
            "antecedent": list(self.antecedent),
            "achieved_y": self.achieved_y,
            "error": self.error,
            "achieved_class": self.achieved_class,
            "success": self.success,
            "deltas": [d.to_dict() for d in self.deltas],
            "no_free_variables": self.no_free_variables,
            "trace": self.trace.summary(),
        }


def objective(model: TskModel, query: CounterfactualQuery) -> Callable[[np.ndarray], float]:
    """Squared gap between the model output and the desired target value."""
    if len(query.factual) != model.n_inputs:
        raise DimensionMismatch(
            f"query has {len(query.factual)} features, model has {model.n_inputs}"
        )
    p = model._packed
    return kernels.SquaredErrorObjective(
        p.centers, p.widths, p.input_of, p.rule_mf, p.coeffs, query.desired_consequent
    )


def delta_report(
    factual: Sequence[float],
    antecedent: Sequence[float],
    feature_names: Sequence[str],
) -> tuple[VariableDelta, ...]:
    """Classify each variable's move as additive, subtractive, or unchanged."""
    if not len(factual) == len(antecedent) == len(feature_names):
        raise DimensionMismatch(
            f"lengths differ: factual {len(factual)}, antecedent {len(antecedent)}, "
            f"names {len(feature_names)}"
        )
    deltas = []
    for name, before, after in zip(feature_names, factual, antecedent):
        before = float(before)
        after = float(after)
        if after > before + DELTA_EPS:
            direction = ADDITIVE
        elif after < before - DELTA_EPS:
            direction = SUBTRACTIVE
        else:
            direction = UNCHANGED
        deltas.append(VariableDelta(name, before, after, direction))
    return tuple(deltas)


def _success(model: TskModel, query: CounterfactualQuery, achieved_y: float, achieved_class: str) -> bool:
    enc = model.label_encoding
    target_class = enc.class_of_target(query.desired_consequent)
    within_margin = abs(achieved_y - query.desired_consequent) < 0.5 - query.success_margin
    return achieved_class == target_class and within_margin


def _result_for(
    model: TskModel,
    query: CounterfactualQuery,
    antecedent: np.ndarray,
    trace: AnnealTrace,
    no_free: bool = False,
) -> CounterfactualResult:
    achieved_y = evaluate(model, antecedent)
    achieved_class = classify(model, antecedent)
    return CounterfactualResult(
        antecedent=tuple(float(v) for v in antecedent),
        achieved_y=achieved_y,
        error=(achieved_y - query.desired_consequent) ** 2,
        achieved_class=achieved_class,
        success=_success(model, query, achieved_y, achieved_class),
        deltas=delta_report(query.factual, antecedent, model.feature_names),
        trace=trace,
        no_free_variables=no_free,
    )


def find_counterfactual(model: TskModel, query: CounterfactualQuery) -> CounterfactualResult:
    """Anneal the free antecedent variables toward the desired consequent.

    The factual is the search's start point and incumbent, so the result
    error never exceeds the factual's own. Locked variables come back
    bit-identical. With nothing free, or with the factual already within the
    target error, the factual itself is scored and returned.
    """
    fn = objective(model, query)
    x0 = np.asarray(query.factual, dtype=np.float64)
    mask = np.asarray(query.free_mask, dtype=bool)
    f0 = fn(x0)

    if not mask.any():
        trace = AnnealTrace(initial_error=f0)
        return _result_for(model, query, x0, trace, no_free=True)
    if query.anneal._target_reached(f0):
        trace = AnnealTrace(initial_error=f0)
        return _result_for(model, query, x0, trace)

    best_x, _, trace = minimize(fn, x0, mask, query.anneal)
    locked = ~mask
    assert np.array_equal(best_x[locked], x0[locked]), "locked variables moved"
    return _result_for(model, query, best_x, trace)
