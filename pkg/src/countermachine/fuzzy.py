"""First-order Takagi-Sugeno fuzzy rule base: types, inference, JSON round-trip.

A model maps an antecedent vector x in [0,1]^n to a scalar consequent
y = sum_r w_r(x) * (a_r0 + a_r . x) / sum_r w_r(x), where each rule's firing
strength w_r is the product of one Gaussian membership value per input.
Models are immutable after construction and safe to evaluate concurrently.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from ._backend import kernels
from .errors import DimensionMismatch, MalformedModel

WAR = "war"
PEACE = "peace"

MODEL_FORMAT_VERSION = 1

# total rule activation below this is clamped in the weighted average
DEGENERATE_ACTIVATION = 1e-12


@dataclass(frozen=True)
class MembershipFunction:
    """Gaussian membership bump: evaluates to 1 at `center`, width > 0."""

    center: float
    width: float

    def __post_init__(self):
        if not (math.isfinite(self.center) and math.isfinite(self.width)):
            raise MalformedModel("membership parameters must be finite")
        if self.width <= 0.0:
            raise MalformedModel(f"membership width must be > 0, got {self.width}")


def mf_value(mf: MembershipFunction, x: float) -> float:
    """Membership degree of x, in (0, 1]. Equals 1 exactly at the center."""
    d = x - mf.center
    return math.exp(-(d * d) / (2.0 * mf.width * mf.width))


@dataclass(frozen=True)
class Rule:
    """One fuzzy rule: a membership index per input plus affine consequent.

    `coeffs` has length n_inputs + 1 with the constant term first.
    """

    mf_indices: tuple[int, ...]
    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "mf_indices", tuple(int(i) for i in self.mf_indices))
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) != len(self.mf_indices) + 1:
            raise MalformedModel(
                f"rule with {len(self.mf_indices)} inputs needs "
                f"{len(self.mf_indices) + 1} coefficients, got {len(self.coeffs)}"
            )
        if not all(math.isfinite(c) for c in self.coeffs):
            raise MalformedModel("rule coefficients must be finite")


@dataclass(frozen=True)
class LabelEncoding:
    """Mapping between the numeric output scale and the war/peace classes."""

    war: float = 1.0
    peace: float = 0.0
    threshold: float = 0.5

    def __post_init__(self):
        vals = (self.war, self.peace, self.threshold)
        if not all(math.isfinite(v) for v in vals):
            raise MalformedModel("label encoding values must be finite")
        if self.war == self.peace:
            raise MalformedModel("war and peace must encode to distinct values")

    def class_of_target(self, t: float) -> str:
        """Class whose side of the threshold a target value falls on."""
        if self.war >= self.peace:
            return WAR if t >= self.threshold else PEACE
        return WAR if t <= self.threshold else PEACE

    def target_value(self, label: str) -> float:
        if label == WAR:
            return self.war
        if label == PEACE:
            return self.peace
        raise ValueError(f"unknown label {label!r}")


class _Packed:
    """Flat array view of a model for the inference kernels."""

    __slots__ = ("centers", "widths", "input_of", "rule_mf", "coeffs")

    def __init__(self, model: TskModel):
        centers, widths, input_of = [], [], []
        offsets = []
        for i, mfs in enumerate(model.mfs_per_input):
            offsets.append(len(centers))
            for mf in mfs:
                centers.append(mf.center)
                widths.append(mf.width)
                input_of.append(i)
        self.centers = np.asarray(centers, dtype=np.float64)
        self.widths = np.asarray(widths, dtype=np.float64)
        self.input_of = np.asarray(input_of, dtype=np.int64)
        self.rule_mf = np.asarray(
            [
                [offsets[i] + mi for i, mi in enumerate(rule.mf_indices)]
                for rule in model.rules
            ],
            dtype=np.int64,
        )
        self.coeffs = np.asarray([rule.coeffs for rule in model.rules], dtype=np.float64)


@dataclass(frozen=True)
class TskModel:
    """Immutable rule base over named inputs on the [0,1] scale."""

    feature_names: tuple[str, ...]
    mfs_per_input: tuple[tuple[MembershipFunction, ...], ...]
    rules: tuple[Rule, ...]
    label_encoding: LabelEncoding = LabelEncoding()

    def __post_init__(self):
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(
            self, "mfs_per_input", tuple(tuple(mfs) for mfs in self.mfs_per_input)
        )
        object.__setattr__(self, "rules", tuple(self.rules))
        n = len(self.feature_names)
        if n == 0:
            raise MalformedModel("model needs at least one input")
        if len(set(self.feature_names)) != n:
            raise MalformedModel("feature names must be unique")
        if len(self.mfs_per_input) != n:
            raise MalformedModel(
                f"expected {n} membership lists, got {len(self.mfs_per_input)}"
            )
        if any(len(mfs) == 0 for mfs in self.mfs_per_input):
            raise MalformedModel("every input needs at least one membership function")
        if len(self.rules) == 0:
            raise MalformedModel("rule base must be nonempty")
        for r, rule in enumerate(self.rules):
            if len(rule.mf_indices) != n:
                raise MalformedModel(
                    f"rule {r} indexes {len(rule.mf_indices)} inputs, model has {n}"
                )
            for i, mi in enumerate(rule.mf_indices):
                if not 0 <= mi < len(self.mfs_per_input[i]):
                    raise MalformedModel(
                        f"rule {r} uses membership {mi} of input {i}, "
                        f"which has {len(self.mfs_per_input[i])}"
                    )

    @property
    def n_inputs(self) -> int:
        return len(self.feature_names)

    @property
    def n_rules(self) -> int:
        return len(self.rules)

    @cached_property
    def _packed(self) -> _Packed:
        return _Packed(self)


@dataclass(frozen=True)
class FeatureVector:
    """Ordered antecedent values, each in [0, 1]."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        for i, v in enumerate(self.values):
            if not math.isfinite(v) or not 0.0 <= v <= 1.0:
                raise ValueError(f"feature {i} must lie in [0, 1], got {v}")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.values)


InputLike = "FeatureVector | Sequence[float] | np.ndarray"


def as_input_array(model: TskModel, x) -> np.ndarray:
    """Coerce an input to a contiguous float64 array of the model's width."""
    if isinstance(x, FeatureVector):
        arr = x.as_array()
    else:
        arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != model.n_inputs:
        raise DimensionMismatch(
            f"expected {model.n_inputs} features, got {arr.shape[0] if arr.ndim == 1 else arr.shape}"
        )
    return arr


@dataclass(frozen=True)
class EvalResult:
    """Model output plus the raw total rule activation behind it."""

    y: float
    total_firing: float
    degenerate: bool


def firing_strengths(model: TskModel, x) -> np.ndarray:
    """Per-rule firing strengths at x, each in (0, 1]."""
    xv = as_input_array(model, x)
    p = model._packed
    return kernels.firing_point(p.centers, p.widths, p.input_of, p.rule_mf, xv)


def evaluate(model: TskModel, x) -> float:
    """Consequent value at x (normalized weighted average of rule outputs)."""
    xv = as_input_array(model, x)
    p = model._packed
    y, _ = kernels.eval_point(p.centers, p.widths, p.input_of, p.rule_mf, p.coeffs, xv)
    return float(y)


def evaluate_full(model: TskModel, x) -> EvalResult:
    """Like `evaluate` but also reports degenerate (clamped) activation."""
    xv = as_input_array(model, x)
    p = model._packed
    y, wsum = kernels.eval_point(
        p.centers, p.widths, p.input_of, p.rule_mf, p.coeffs, xv
    )
    return EvalResult(float(y), float(wsum), bool(wsum < DEGENERATE_ACTIVATION))


def classify(model: TskModel, x) -> str:
    """War/peace decision for x. Threshold ties go to war."""
    y = evaluate(model, x)
    enc = model.label_encoding
    if enc.war >= enc.peace:
        return WAR if y >= enc.threshold else PEACE
    return WAR if y <= enc.threshold else PEACE


# --- JSON document round-trip -------------------------------------------------

def model_to_dict(model: TskModel) -> dict:
    return {
        "version": MODEL_FORMAT_VERSION,
        "feature_names": list(model.feature_names),
        "mfs": [
            [{"center": mf.center, "width": mf.width} for mf in mfs]
            for mfs in model.mfs_per_input
        ],
        "rules": [
            {"mf_indices": list(rule.mf_indices), "coeffs": list(rule.coeffs)}
            for rule in model.rules
        ],
        "label_encoding": {
            "war": model.label_encoding.war,
            "peace": model.label_encoding.peace,
            "threshold": model.label_encoding.threshold,
        },
    }


def model_from_dict(doc: dict) -> TskModel:
    if not isinstance(doc, dict):
        raise MalformedModel("model document must be a JSON object")
    try:
        version = doc["version"]
        names = doc["feature_names"]
        mfs_doc = doc["mfs"]
        rules_doc = doc["rules"]
        enc_doc = doc["label_encoding"]
    except KeyError as exc:
        raise MalformedModel(f"model document missing field {exc.args[0]!r}") from None
    if version != MODEL_FORMAT_VERSION:
        raise MalformedModel(f"unsupported model format version {version!r}")
    try:
        mfs = tuple(
            tuple(MembershipFunction(float(m["center"]), float(m["width"])) for m in group)
            for group in mfs_doc
        )
        rules = tuple(
            Rule(tuple(r["mf_indices"]), tuple(r["coeffs"])) for r in rules_doc
        )
        encoding = LabelEncoding(
            war=float(enc_doc["war"]),
            peace=float(enc_doc["peace"]),
            threshold=float(enc_doc["threshold"]),
        )
    except MalformedModel:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedModel(f"malformed model document: {exc}") from None
    return TskModel(
        feature_names=tuple(str(n) for n in names),
        mfs_per_input=mfs,
        rules=rules,
        label_encoding=encoding,
    )


def dumps_model(model: TskModel, indent: int | None = None) -> str:
    return json.dumps(model_to_dict(model), indent=indent)


def loads_model(text: str) -> TskModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedModel(f"model document is not valid JSON: {exc}") from None
    return model_from_dict(doc)


def save_model(model: TskModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model, indent=2))
        fh.write("\n")


def load_model(path) -> TskModel:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_model(fh.read())
