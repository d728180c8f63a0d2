"""Simulated annealing over box-constrained vectors in [0, 1]^n.

Geometric cooling with Gaussian proposals whose spread shrinks with the
temperature, Metropolis acceptance, and independently seeded restarts that
all begin from the caller's start point. A single chain is strictly
sequential; the run is deterministic given the config seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NonFiniteObjective

TRACE_CSV_HEADER = ("eval_index", "temperature", "error")


@dataclass(frozen=True)
class AnnealConfig:
    initial_temperature: float = 1.0
    cooling_factor: float = 0.95
    steps_per_temperature: int = 50
    min_temperature: float = 1e-5
    # proposal spread is scale*T per free coordinate; at the default scale
    # the spread tracks the Gibbs equilibrium width closely enough to keep
    # the chain mobile through the whole cooldown
    proposal_scale: float = 1.0
    # None disables early stopping (needed for objectives that go negative)
    target_error: float | None = 1e-4
    max_evaluations: int = 200_000
    restarts: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.initial_temperature <= 0:
            raise ValueError("initial_temperature must be > 0")
        if not 0.0 < self.cooling_factor < 1.0:
            raise ValueError("cooling_factor must be in (0, 1)")
        if self.steps_per_temperature < 1:
            raise ValueError("steps_per_temperature must be >= 1")
        if not 0.0 < self.min_temperature < self.initial_temperature:
            raise ValueError("need 0 < min_temperature < initial_temperature")
        if self.proposal_scale <= 0:
            raise ValueError("proposal_scale must be > 0")
        if self.target_error is not None and self.target_error < 0:
            raise ValueError("target_error must be >= 0 (or None to disable)")
        if self.max_evaluations < 0:
            raise ValueError("max_evaluations must be >= 0")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")

    def _target_reached(self, best: float) -> bool:
        return self.target_error is not None and best <= self.target_error


@dataclass
class AnnealTrace:
    """Accepted-step records grouped per restart.

    Each record is (global evaluation index, temperature, error of the state
    accepted at that step). Every restart's record list starts with the
    incumbent, so per-restart best errors are the running minimum.
    """

    records: list[list[tuple[int, float, float]]] = field(default_factory=list)
    best_error_per_restart: list[float] = field(default_factory=list)
    initial_error: float = math.nan
    n_evaluations: int = 0

    def flat_records(self) -> list[tuple[int, float, float]]:
        return [rec for restart in self.records for rec in restart]

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRACE_CSV_HEADER)
            for idx, temp, err in self.flat_records():
                writer.writerow([idx, repr(temp), repr(err)])

    def summary(self) -> dict:
        return {
            "best_error_per_restart": list(self.best_error_per_restart),
            "n_evaluations": self.n_evaluations,
            "n_accepted": sum(len(r) for r in self.records),
        }


def propose(
    x: np.ndarray,
    free_mask: np.ndarray,
    scale: float,
    temperature: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Perturb free coordinates with N(0, (scale*temperature)^2), clamp to [0,1].

    Locked coordinates are copied bit-for-bit.
    """
    out = x.copy()
    idx = np.flatnonzero(free_mask)
    if idx.size:
        out[idx] = np.clip(
            out[idx] + rng.normal(0.0, scale * temperature, idx.size), 0.0, 1.0
        )
    return out


def accept(delta_error: float, temperature: float, rng: np.random.Generator) -> bool:
    """Metropolis rule: downhill always, uphill with prob exp(-delta/T)."""
    if delta_error <= 0.0:
        return True
    return rng.random() < math.exp(-delta_error / temperature)


def _check_finite(value: float, where: str) -> float:
    if not math.isfinite(value):
        raise NonFiniteObjective(f"objective returned {value!r} at {where}")
    return value


def minimize(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float] | np.ndarray,
    free_mask: Sequence[bool] | np.ndarray,
    config: AnnealConfig,
) -> tuple[np.ndarray, float, AnnealTrace]:
    """Best vector found over all restarts, its error, and the trace.

    The start point is the incumbent, so the returned error never exceeds
    objective(x0). `max_evaluations` is the total proposal budget shared by
    all restarts; the incumbent evaluation is not counted against it.
    Termination: target error reached, temperature floor, or budget.
    """
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    mask = np.ascontiguousarray(free_mask, dtype=bool)
    if mask.shape != x0.shape:
        raise ValueError(f"free_mask shape {mask.shape} != x0 shape {x0.shape}")
    if x0.size and (x0.min() < 0.0 or x0.max() > 1.0):
        raise ValueError("x0 must lie in the [0, 1] box")

    f0 = _check_finite(float(objective(x0)), "the start point")
    best_x = x0.copy()
    best_f = f0
    trace = AnnealTrace(initial_error=f0)

    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    evals = 0
    for restart, seed in enumerate(seeds):
        if evals >= config.max_evaluations or config._target_reached(best_f):
            break
        rng = np.random.default_rng(seed)
        cur_x = x0.copy()
        cur_f = f0
        restart_best = f0
        records = [(evals, config.initial_temperature, f0)]
        temperature = config.initial_temperature
        while (
            temperature >= config.min_temperature
            and evals < config.max_evaluations
            and not config._target_reached(best_f)
        ):
            for _ in range(config.steps_per_temperature):
                if evals >= config.max_evaluations or config._target_reached(best_f):
                    break
                cand = propose(cur_x, mask, config.proposal_scale, temperature, rng)
                cand_f = float(objective(cand))
                evals += 1
                _check_finite(cand_f, f"evaluation {evals}")
                if accept(cand_f - cur_f, temperature, rng):
                    cur_x = cand
                    cur_f = cand_f
                    records.append((evals, temperature, cand_f))
                    if cand_f < restart_best:
                        restart_best = cand_f
                    if cand_f < best_f:
                        best_f = cand_f
                        best_x = cand.copy()
            temperature *= config.cooling_factor
        trace.records.append(records)
        trace.best_error_per_restart.append(restart_best)

    trace.n_evaluations = evals
    return best_x, best_f, trace
