"""Shared fixtures and independent oracles.

The oracle here recomputes model outputs with plain Python loops over plain
tuples, on purpose: it shares no code with the package's inference paths.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from countermachine import LabelEncoding, MembershipFunction, Rule, TskModel

# ---- independent brute-force recomputation ----------------------------------


def oracle_firing(mfs, rules, x):
    """mfs: per-input list of (center, width); rules: list of (indices, coeffs)."""
    out = []
    for indices, _ in rules:
        w = 1.0
        for i, mi in enumerate(indices):
            c, s = mfs[i][mi]
            w *= math.exp(-((x[i] - c) ** 2) / (2.0 * s * s))
        out.append(w)
    return out

def oracle_evaluate(mfs, rules, x):
    ws = oracle_firing(mfs, rules, x)
    num = 0.0
    den = 0.0
    for (indices, coeffs), w in zip(rules, ws):
        g = coeffs[0]
        for i in range(len(indices)):
            g += coeffs[1 + i] * x[i]
        num += w * g
        den += w
    return num / max(den, 1e-12)


def make_model(mfs, rules, feature_names=None, encoding=None):
    """Build a TskModel from the plain-tuple form the oracle uses."""
    n = len(mfs)
    names = feature_names or tuple(f"x{i}" for i in range(n))
    return TskModel(
        feature_names=tuple(names),
        mfs_per_input=tuple(
            tuple(MembershipFunction(c, s) for c, s in group) for group in mfs
        ),
        rules=tuple(Rule(tuple(idx), tuple(coeffs)) for idx, coeffs in rules),
        label_encoding=encoding or LabelEncoding(),
    )


def random_model_spec(rng, max_inputs=3, max_mfs=3, max_rules=8, constant_only=False):
    """Random small model in plain-tuple form, paired with its TskModel."""
    n = int(rng.integers(1, max_inputs + 1))
    mfs = [
        [
            (float(rng.uniform(0, 1)), float(rng.uniform(0.05, 0.6)))
            for _ in range(int(rng.integers(1, max_mfs + 1)))
        ]
        for _ in range(n)
    ]
    n_rules = int(rng.integers(1, max_rules + 1))
    rules = []
    for _ in range(n_rules):
        indices = tuple(int(rng.integers(0, len(mfs[i]))) for i in range(n))
        if constant_only:
            coeffs = (float(rng.uniform(-2, 2)),) + (0.0,) * n
        else:
            coeffs = tuple(float(rng.uniform(-2, 2)) for _ in range(n + 1))
        rules.append((indices, coeffs))
    return mfs, rules, make_model(mfs, rules)


# ---- shared fixture models ---------------------------------------------------

FIXTURE_MFS = [[(0.2, 0.3), (0.8, 0.25)], [(0.1, 0.4), (0.9, 0.35)]]
FIXTURE_RULES = [
    ((0, 0), (0.1, 0.4, -0.2)),
    ((0, 1), (0.9, -0.3, 0.1)),
    ((1, 0), (0.5, 0.2, 0.2)),
    ((1, 1), (0.0, 0.6, 0.3)),
]


@pytest.fixture
def fixture_model():
    """2-input, 4-rule model with hand-pinned parameters."""
    return make_model(FIXTURE_MFS, FIXTURE_RULES)


# A dyad vector the linear demo model maps deep into war territory:
# zero distance, shared border, some capability, few ties.
CONFLICT_FACTUAL = (0.0, 1.0, 0.4, 0.1, 0.3, 0.1, 0.6)

DYAD_FEATURES = (
    "distance",
    "contiguity",
    "major_power",
    "allies",
    "democracy",
    "econ_interdependence",
    "capability",
)


def make_war_model():
    """Single-rule 7-input model, exactly linear, war-leaning near the factual.

    y = 0.5 - 0.6*distance + 0.5*contiguity - 0.3*allies - 0.4*democracy
        - 0.2*econ_interdependence
    """
    coeffs = (0.5, -0.6, 0.5, 0.0, -0.3, -0.4, -0.2, 0.0)
    mfs = tuple((MembershipFunction(0.5, 0.5),) for _ in range(7))
    return TskModel(
        feature_names=DYAD_FEATURES,
        mfs_per_input=mfs,
        rules=(Rule((0,) * 7, coeffs),),
        label_encoding=LabelEncoding(),
    )


@pytest.fixture
def war_model():
    return make_war_model()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
