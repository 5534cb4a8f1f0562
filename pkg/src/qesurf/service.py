"""HTTP service exposing the toolkit: model catalog, solvers, invariants,
classification, cotangent-bundle extension checks, and the full
verification harness.

Model references in request bodies are either a registry label / family
name (string) or an inline JSON model object
``{"kind": "typeA"|"typeB"|"sphere"|"hyperbolic+"|"hyperbolic-",
"Gamma"/"C": {"111": r, ...}, "params": {...}}``.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import classify, extension, killing, registry, solver, surface, terms, verify
from .errors import QesurfError
from .surface import SurfaceModel, model_from_dict, model_to_dict
from .terms import format_closed_form

app = FastAPI(title="qesurf", version="0.1.0")


# ---------------------------------------------------------------------------
# request / response schemas


class ModelRef(BaseModel):
    """A model reference: registry label, or inline model object, with
    optional family parameters for parametrized families."""

    model: str | dict
    params: dict[str, float] = Field(default_factory=dict)


class SolveRequest(ModelRef):
    mu: float


class ExtendRequest(ModelRef):
    mu: float
    f: str | None = None
    phi: str = "zero"


class VerifyRequest(BaseModel):
    only: list[str] | None = None


class BasisOut(BaseModel):
    mu: float
    dim: int
    residual: float
    method: str
    flags: list[str]
    basis: list[str]


class InfoOut(BaseModel):
    model: dict
    name: str
    flat: bool
    strongly_projectively_flat: bool
    ricci_rank: int
    ricci_signature: str
    killing_dim: int
    psi: float | None
    Psi: float | None
    alpha_X: float | None
    eps_X: int | None
    on_line_L: bool | None


class SpecialMuOut(BaseModel):
    candidates: list[dict]


class ClassifyOut(BaseModel):
    family: str
    parameters: dict[str, float]
    notes: list[str]


class ExtendOut(BaseModel):
    mu: float
    f: str
    phi: str
    residual_qe: float
    residual_null: float
    kahler: dict | None


def _resolve(ref: ModelRef) -> SurfaceModel:
    if isinstance(ref.model, dict):
        return model_from_dict(ref.model)
    name = ref.model
    if ref.params:
        return registry.family_model(name, **ref.params)
    if name.strip().startswith("{"):
        return registry.load_model(name)
    try:
        return registry.get(name).model
    except QesurfError:
        if name in registry.family_names():
            raise QesurfError(
                f"family {name!r} needs parameters (e.g. params={{'c': 1.0}})"
            )
        raise


def _guard(fn):
    try:
        return fn()
    except QesurfError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


# ---------------------------------------------------------------------------
# endpoints


@app.get("/models")
def list_models() -> dict:
    entries = registry.entries()
    return {
        "labels": [e.label for e in entries],
        "families": registry.family_names(),
    }


@app.get("/models/{label}")
def model_detail(label: str) -> dict:
    def run():
        e = registry.get(label)
        return {
            "label": e.label,
            "model": model_to_dict(e.model),
            "killing_dim": e.killing_dim,
            "classify_family": e.classify_family,
            "isomorphic_to": list(e.isomorphic_to),
            "expected": [
                {"mu": exp.mu, "dim": len(exp.basis), "complete": exp.complete,
                 "cite": exp.cite, "basis": [str(f) for f in exp.basis]}
                for exp in e.expected
            ],
            "notes": e.notes,
        }

    return _guard(run)


@app.post("/info", response_model=InfoOut)
def info(req: ModelRef) -> InfoOut:
    def run():
        model = _resolve(req)
        sig = classify.invariants(model)
        on_l = None
        if sig.psi is not None:
            on_l = classify.on_line_L(sig.psi, sig.Psi, tol=1e-8)
        return InfoOut(
            model=model_to_dict(model),
            name=model.name,
            flat=sig.flat,
            strongly_projectively_flat=sig.spf,
            ricci_rank=sig.ricci_rank,
            ricci_signature=sig.ricci_signature,
            killing_dim=sig.killing_dim,
            psi=sig.psi,
            Psi=sig.Psi,
            alpha_X=sig.alpha_X,
            eps_X=sig.eps_X,
            on_line_L=on_l,
        )

    return _guard(run)


@app.post("/solve", response_model=BasisOut)
def solve(req: SolveRequest) -> BasisOut:
    def run():
        model = _resolve(req)
        sb = solver.solve(model, req.mu)
        return BasisOut(
            mu=req.mu,
            dim=sb.dim,
            residual=sb.residual,
            method=sb.method,
            flags=list(sb.flags),
            basis=[format_closed_form(f) if isinstance(f, terms.ClosedForm) else str(f)
                   for f in sb.basis],
        )

    return _guard(run)


@app.post("/special-mu", response_model=SpecialMuOut)
def special_mu(req: ModelRef) -> SpecialMuOut:
    def run():
        model = _resolve(req)
        cands = solver.special_eigenvalues(model)
        return SpecialMuOut(
            candidates=[
                {"mu": None if math.isnan(s.mu) else s.mu, "dim": s.dim,
                 "source": s.source, "note": s.note}
                for s in cands
            ]
        )

    return _guard(run)


@app.post("/killing-dim")
def killing_dim(req: ModelRef) -> dict:
    def run():
        model = _resolve(req)
        return {"killing_dim": killing.killing_dimension(model)}

    return _guard(run)


@app.post("/classify", response_model=ClassifyOut)
def classify_model(req: ModelRef) -> ClassifyOut:
    def run():
        model = _resolve(req)
        label = classify.classify(model)
        return ClassifyOut(
            family=label.family,
            parameters={k: float(v) for k, v in (label.parameters or {}).items()},
            notes=list(label.notes or ()),
        )

    return _guard(run)


def _pick_extension_f(model: SurfaceModel, mu: float):
    """Choose a sign-definite eigenfunction for the isotropic check."""
    sb = solver.solve(model, mu)
    pts = surface.standard_points(model)
    last = None
    for f in sb.basis:
        for cand in (f, f * (-1.0) if isinstance(f, terms.ClosedForm) else None):
            if cand is None:
                continue
            try:
                vals = [cand.evaluate(p) for p in pts]
            except QesurfError:
                continue
            if min(vals) > 1e-10:
                return cand
            last = cand
    if last is None:
        raise QesurfError(f"no eigenfunction available at mu={mu:.12g}")
    raise QesurfError(
        f"no sign-definite eigenfunction at mu={mu:.12g}; pass one explicitly via 'f'"
    )


@app.post("/extend", response_model=ExtendOut)
def extend(req: ExtendRequest) -> ExtendOut:
    def run():
        model = _resolve(req)
        if req.f is not None:
            f = terms.parse_closed_form(req.f)
        else:
            f = _pick_extension_f(model, req.mu)
        em = extension.build_extension(model, req.phi)
        chk = extension.verify_isotropic_qe(em, f, req.mu)
        kahler = None
        if surface.kahler_structure(model) is not None:
            nab, sq = extension.walker_kahler_check(em)
            kahler = {"nabla_J": nab, "J_squared": sq}
        return ExtendOut(
            mu=req.mu,
            f=format_closed_form(f) if isinstance(f, terms.ClosedForm) else str(f),
            phi=req.phi,
            residual_qe=chk.residual_qe,
            residual_null=chk.residual_null,
            kahler=kahler,
        )

    return _guard(run)


@app.post("/verify")
def verify_endpoint(req: VerifyRequest) -> dict:
    def run():
        rep = verify.verify_paper(only=req.only)
        return rep.to_dict()

    return _guard(run)
