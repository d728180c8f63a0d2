"""HTTP facade over evaluate and find_counterfactual.

The loaded model is immutable for the process lifetime, so every response is
a pure function of (model file, request body, seed) and concurrent requests
cannot interfere. Validation is done by hand so the status contract stays
explicit: 400 for dimension/range/shape problems with a field-level message,
422 only for an all-locked counterfactual query.
"""

from __future__ import annotations

import math
from dataclasses import fields as dataclass_fields
from typing import Sequence

from fastapi import Body, FastAPI, HTTPException

from .annealing import AnnealConfig
from .counterfactual import CounterfactualQuery, find_counterfactual
from .fuzzy import PEACE, WAR, TskModel, classify, evaluate

_ANNEAL_FIELDS = {f.name for f in dataclass_fields(AnnealConfig)}


def _bad_request(field: str, message: str):
    return HTTPException(status_code=400, detail={"field": field, "message": message})


def _check_features(values, n_inputs: int, field: str) -> list[float]:
    if not isinstance(values, (list, tuple)):
        raise _bad_request(field, "must be an array of numbers")
    if len(values) != n_inputs:
        raise _bad_request(field, f"expected {n_inputs} values, got {len(values)}")
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise _bad_request(f"{field}[{i}]", "must be a number")
        v = float(v)
        if not math.isfinite(v) or not 0.0 <= v <= 1.0:
            raise _bad_request(f"{field}[{i}]", f"must lie in [0, 1], got {v}")
        out.append(v)
    return out


def build_app(model: TskModel, allow_origins: Sequence[str] = ()) -> FastAPI:
    app = FastAPI(title="countermachine")
    if allow_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(allow_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    feature_names = list(model.feature_names)

    @app.get("/model")
    def get_model() -> dict:
        enc = model.label_encoding
        return {
            "feature_names": feature_names,
            "label_encoding": {
                "war": enc.war,
                "peace": enc.peace,
                "threshold": enc.threshold,
            },
            "rule_count": model.n_rules,
        }

    @app.post("/evaluate")
    def post_evaluate(payload: dict = Body(...)) -> dict:
        if "features" not in payload:
            raise _bad_request("features", "field is required")
        features = _check_features(payload["features"], model.n_inputs, "features")
        return {
            "y": evaluate(model, features),
            "class": classify(model, features),
            "feature_names": feature_names,
        }

    @app.post("/counterfactual")
    def post_counterfactual(payload: dict = Body(...)) -> dict:
        if "factual" not in payload:
            raise _bad_request("factual", "field is required")
        factual = _check_features(payload["factual"], model.n_inputs, "factual")

        target = payload.get("target")
        enc = model.label_encoding
        if target in (WAR, PEACE):
            t_d = enc.target_value(target)
        elif isinstance(target, (int, float)) and not isinstance(target, bool):
            t_d = float(target)
            if not 0.0 <= t_d <= 1.0:
                raise _bad_request("target", f"numeric target must lie in [0, 1], got {t_d}")
        else:
            raise _bad_request(
                "target", f"must be '{WAR}', '{PEACE}', or a number in [0, 1]"
            )

        free = payload.get("free")
        if free is None:
            mask = [True] * model.n_inputs
        else:
            if not isinstance(free, list):
                raise _bad_request("free", "must be an array of feature names")
            unknown = [n for n in free if n not in feature_names]
            if unknown:
                raise _bad_request("free", f"unknown feature name(s): {', '.join(unknown)}")
            mask = [name in free for name in feature_names]
        if not any(mask):
            raise HTTPException(
                status_code=422,
                detail={
                    "field": "free",
                    "message": "no free variables: nothing may change",
                },
            )

        anneal_doc = payload.get("anneal") or {}
        if not isinstance(anneal_doc, dict):
            raise _bad_request("anneal", "must be an object")
        unknown = [k for k in anneal_doc if k not in _ANNEAL_FIELDS]
        if unknown:
            raise _bad_request("anneal", f"unknown option(s): {', '.join(unknown)}")
        try:
            anneal = AnnealConfig(**anneal_doc)
        except (TypeError, ValueError) as exc:
            raise _bad_request("anneal", str(exc))

        margin = payload.get("success_margin", 0.1)
        if (
            isinstance(margin, bool)
            or not isinstance(margin, (int, float))
            or not 0.0 < float(margin) < 0.5
        ):
            raise _bad_request("success_margin", "must be a number in (0, 0.5)")

        query = CounterfactualQuery(
            factual=tuple(factual),
            desired_consequent=t_d,
            free_mask=tuple(mask),
            anneal=anneal,
            success_margin=float(margin),
        )
        result = find_counterfactual(model, query)
        doc = result.to_dict()
        doc["feature_names"] = feature_names
        return doc

    return app
