"""Dyadic dataset handling: schema, normalization, balanced splits, CSV, synthetic data.

Raw records follow the conflict-dyad convention: one row per pair of states
with geographic, political and economic covariates plus a war/peace label.
Normalization maps every feature onto [0, 1]: min-max for the continuous
features, fixed encodings for the categorical ones (contiguity and alliance
as 0/1, shared major-power status as 0 / 0.5 / 1).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateFeature,
    InsufficientClassRows,
    ParseError,
    RangeError,
)
from .fuzzy import PEACE, WAR

FEATURE_NAMES = (
    "distance",
    "contiguity",
    "major_power",
    "allies",
    "democracy",
    "econ_interdependence",
    "capability",
)

# features rescaled by batch min-max; the rest use fixed categorical encodings
MINMAX_FEATURES = ("distance", "democracy", "econ_interdependence", "capability")

CSV_COLUMNS = (
    "distance_km",
    "contiguity",
    "major_power_count",
    "allied",
    "democracy_score",
    "econ_interdependence",
    "capability",
    "label",
)


@dataclass(frozen=True)
class DyadRecord:
    """One raw state-pair observation."""

    distance_km: float
    contiguity: bool
    major_power_count: int
    allied: bool
    democracy_score: float
    econ_interdependence: float
    capability: float
    label: str

    def __post_init__(self):
        if not math.isfinite(self.distance_km) or self.distance_km < 0:
            raise RangeError(f"distance_km must be >= 0, got {self.distance_km}")
        if self.major_power_count not in (0, 1, 2):
            raise RangeError(
                f"major_power_count must be 0, 1 or 2, got {self.major_power_count}"
            )
        if not math.isfinite(self.democracy_score):
            raise RangeError("democracy_score must be finite")
        if not math.isfinite(self.econ_interdependence) or self.econ_interdependence < 0:
            raise RangeError(
                f"econ_interdependence must be >= 0, got {self.econ_interdependence}"
            )
        if not math.isfinite(self.capability) or self.capability < 0:
            raise RangeError(f"capability must be >= 0, got {self.capability}")
        if self.label not in (WAR, PEACE):
            raise RangeError(f"label must be '{WAR}' or '{PEACE}', got {self.label!r}")


@dataclass(frozen=True)
class Dataset:
    """Normalized feature matrix plus labels and the min-max parameters used."""

    feature_names: tuple[str, ...]
    X: np.ndarray  # (n_rows, n_features) float64 in [0, 1]
    labels: np.ndarray  # (n_rows,) int8, 1 = war, 0 = peace
    normalization_params: Mapping[str, tuple[float, float]]

    @property
    def n_rows(self) -> int:
        return int(self.X.shape[0])

    def label_strings(self) -> list[str]:
        return [WAR if v else PEACE for v in self.labels]


def _raw_feature_columns(records: Sequence[DyadRecord]) -> dict[str, np.ndarray]:
    return {
        "distance": np.array([r.distance_km for r in records], dtype=np.float64),
        "contiguity": np.array([1.0 if r.contiguity else 0.0 for r in records]),
        "major_power": np.array([r.major_power_count / 2.0 for r in records]),
        "allies": np.array([1.0 if r.allied else 0.0 for r in records]),
        "democracy": np.array([r.democracy_score for r in records], dtype=np.float64),
        "econ_interdependence": np.array(
            [r.econ_interdependence for r in records], dtype=np.float64
        ),
        "capability": np.array([r.capability for r in records], dtype=np.float64),
    }


def _normalize_columns(
    columns: dict[str, np.ndarray],
    params: Mapping[str, tuple[float, float]] | None,
) -> tuple[np.ndarray, dict[str, tuple[float, float]]]:
    out = np.empty((len(next(iter(columns.values()))), len(FEATURE_NAMES)))
    used: dict[str, tuple[float, float]] = {}
    for j, name in enumerate(FEATURE_NAMES):
        col = columns[name]
        if name in MINMAX_FEATURES:
            if params is not None:
                lo, hi = params[name]
            else:
                lo, hi = float(col.min()), float(col.max())
            if not lo < hi:
                raise DegenerateFeature(
                    f"feature {name!r} has min == max ({lo}); min-max scaling undefined"
                )
            # stored params may come from another batch; clip keeps the invariant
            out[:, j] = np.clip((col - lo) / (hi - lo), 0.0, 1.0)
            used[name] = (lo, hi)
        else:
            out[:, j] = col
    return out, used


def normalize(
    records: Sequence[DyadRecord],
    params: Mapping[str, tuple[float, float]] | None = None,
) -> Dataset:
    """Build a normalized Dataset from raw records.

    With `params` given, the stored min-max bounds are reused instead of the
    batch's own (how test data inherits training-set scaling); values falling
    outside are clipped to [0, 1].
    """
    if len(records) == 0:
        raise ValueError("cannot normalize an empty record list")
    columns = _raw_feature_columns(records)
    X, used = _normalize_columns(columns, params)
    labels = np.array([1 if r.label == WAR else 0 for r in records], dtype=np.int8)
    return Dataset(
        feature_names=FEATURE_NAMES,
        X=X,
        labels=labels,
        normalization_params=used,
    )


def split_balanced(
    dataset: Dataset,
    n_train_per_class: int,
    n_test_per_class: int,
    seed: int,
) -> tuple[Dataset, Dataset]:
    """Random disjoint balanced split: exact per-class counts, no replacement."""
    rng = np.random.default_rng(seed)
    war_idx = np.flatnonzero(dataset.labels == 1)
    peace_idx = np.flatnonzero(dataset.labels == 0)
    need = n_train_per_class + n_test_per_class
    for name, idx in ((WAR, war_idx), (PEACE, peace_idx)):
        if len(idx) < need:
            raise InsufficientClassRows(
                f"need {need} {name} rows ({n_train_per_class} train + "
                f"{n_test_per_class} test), pool has {len(idx)}"
            )
    war_perm = rng.permutation(war_idx)
    peace_perm = rng.permutation(peace_idx)
    train_idx = np.concatenate(
        [war_perm[:n_train_per_class], peace_perm[:n_train_per_class]]
    )
    test_idx = np.concatenate(
        [
            war_perm[n_train_per_class : n_train_per_class + n_test_per_class],
            peace_perm[n_train_per_class : n_train_per_class + n_test_per_class],
        ]
    )
    train_idx = rng.permutation(train_idx)
    test_idx = rng.permutation(test_idx)

    def take(idx: np.ndarray) -> Dataset:
        return Dataset(
            feature_names=dataset.feature_names,
            X=dataset.X[idx].copy(),
            labels=dataset.labels[idx].copy(),
            normalization_params=dict(dataset.normalization_params),
        )

    return take(train_idx), take(test_idx)


@dataclass(frozen=True)
class GroundTruthSpec:
    """Labeling rule for synthetic data.

    The war score is a weighted sum over normalized features, with the
    peace-promoting ones entering inverted (as 1 - value); a row is labeled
    war when the score exceeds `threshold`, then flipped with probability
    `noise_rate`.
    """

    weights: Mapping[str, float] = field(
        default_factory=lambda: {
            "distance": 0.30,
            "contiguity": 0.25,
            "democracy": 0.20,
            "allies": 0.15,
            "econ_interdependence": 0.10,
        }
    )
    inverted: frozenset = frozenset(
        {"distance", "democracy", "allies", "econ_interdependence"}
    )
    threshold: float = 0.5
    noise_rate: float = 0.05

    def war_score(self, X: np.ndarray, feature_names: Sequence[str]) -> np.ndarray:
        score = np.zeros(X.shape[0])
        for name, w in self.weights.items():
            col = X[:, feature_names.index(name)]
            score += w * ((1.0 - col) if name in self.inverted else col)
        return score


def generate_synthetic(
    n_rows: int,
    seed: int,
    ground_truth: GroundTruthSpec | None = None,
) -> list[DyadRecord]:
    """Draw raw dyad records with labels from the ground-truth rule plus noise."""
    if n_rows <= 0:
        raise ValueError(f"n_rows must be positive, got {n_rows}")
    spec = ground_truth if ground_truth is not None else GroundTruthSpec()
    rng = np.random.default_rng(seed)
    distance_km = rng.uniform(100.0, 19500.0, n_rows)
    contiguity = rng.random(n_rows) < 0.5
    major_power_count = rng.choice(np.array([0, 1, 2]), size=n_rows, p=[0.55, 0.30, 0.15])
    allied = rng.random(n_rows) < 0.5
    democracy_score = rng.uniform(-10.0, 10.0, n_rows)
    econ = rng.uniform(0.0, 0.35, n_rows)
    capability = rng.uniform(0.0, 1.0, n_rows)

    # labels are assigned on the batch-normalized scale the models see
    columns = {
        "distance": distance_km,
        "contiguity": contiguity.astype(np.float64),
        "major_power": major_power_count / 2.0,
        "allies": allied.astype(np.float64),
        "democracy": democracy_score,
        "econ_interdependence": econ,
        "capability": capability,
    }
    X, _ = _normalize_columns(columns, None)
    war = spec.war_score(X, list(FEATURE_NAMES)) > spec.threshold
    flip = rng.random(n_rows) < spec.noise_rate
    war = war ^ flip

    return [
        DyadRecord(
            distance_km=float(distance_km[i]),
            contiguity=bool(contiguity[i]),
            major_power_count=int(major_power_count[i]),
            allied=bool(allied[i]),
            democracy_score=float(democracy_score[i]),
            econ_interdependence=float(econ[i]),
            capability=float(capability[i]),
            label=WAR if war[i] else PEACE,
        )
        for i in range(n_rows)
    ]


# --- CSV round-trip -----------------------------------------------------------

def save_csv(records: Iterable[DyadRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    repr(r.distance_km),
                    int(r.contiguity),
                    r.major_power_count,
                    int(r.allied),
                    repr(r.democracy_score),
                    repr(r.econ_interdependence),
                    repr(r.capability),
                    r.label,
                ]
            )


def _parse_float(cell: str, row: int, column: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise ParseError(
            f"row {row}, column {column!r}: cannot parse {cell!r} as a number",
            row=row,
            column=column,
        ) from None


def _parse_int(cell: str, row: int, column: str) -> int:
    try:
        return int(cell)
    except ValueError:
        raise ParseError(
            f"row {row}, column {column!r}: cannot parse {cell!r} as an integer",
            row=row,
            column=column,
        ) from None


def _parse_bool(cell: str, row: int, column: str) -> bool:
    value = _parse_int(cell, row, column)
    if value not in (0, 1):
        raise RangeError(
            f"row {row}, column {column!r}: expected 0 or 1, got {value}",
            row=row,
            column=column,
        )
    return bool(value)


def load_csv(path) -> list[DyadRecord]:
    """Read records, reporting the row and column of the first bad cell."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file: no header row") from None
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise ParseError(f"missing column(s): {', '.join(missing)}", column=missing[0])
        extra = [c for c in header if c not in CSV_COLUMNS]
        if extra:
            raise ParseError(f"unknown column(s): {', '.join(extra)}", column=extra[0])
        pos = {name: header.index(name) for name in CSV_COLUMNS}

        records = []
        for i, cells in enumerate(reader, start=1):
            if len(cells) != len(header):
                raise ParseError(
                    f"row {i}: expected {len(header)} cells, got {len(cells)}", row=i
                )

            def cell(name: str) -> str:
                return cells[pos[name]]

            label = cell("label")
            if label not in (WAR, PEACE):
                raise RangeError(
                    f"row {i}, column 'label': expected '{WAR}' or '{PEACE}', "
                    f"got {label!r}",
                    row=i,
                    column="label",
                )
            count = _parse_int(cell("major_power_count"), i, "major_power_count")
            if count not in (0, 1, 2):
                raise RangeError(
                    f"row {i}, column 'major_power_count': expected 0, 1 or 2, got {count}",
                    row=i,
                    column="major_power_count",
                )
            try:
                records.append(
                    DyadRecord(
                        distance_km=_parse_float(cell("distance_km"), i, "distance_km"),
                        contiguity=_parse_bool(cell("contiguity"), i, "contiguity"),
                        major_power_count=count,
                        allied=_parse_bool(cell("allied"), i, "allied"),
                        democracy_score=_parse_float(
                            cell("democracy_score"), i, "democracy_score"
                        ),
                        econ_interdependence=_parse_float(
                            cell("econ_interdependence"), i, "econ_interdependence"
                        ),
                        capability=_parse_float(cell("capability"), i, "capability"),
                        label=label,
                    )
                )
            except RangeError as exc:
                if exc.row is None:
                    raise RangeError(f"row {i}: {exc}", row=i, column=exc.column) from None
                raise
    return records
