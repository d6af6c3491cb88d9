"""FastAPI service: CLS embeddings and pair similarities over HTTP."""

from __future__ import annotations

from contextlib import asynccontextmanager
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import ServiceConfig
from .encoders import build_encoder, encode_pair_text, pair_similarity


class PairText(BaseModel):
    pair_id: str
    left: str
    right: str


class EmbedRequest(BaseModel):
    model: str
    pairs: list[PairText]
    pooling: Literal["cls", "mean"] = "cls"


class SimilarityRequest(BaseModel):
    model: str
    pairs: list[PairText]
    pooling: Literal["cls", "mean"] = "mean"


class PairVector(BaseModel):
    pair_id: str
    values: list[float]


class PairScore(BaseModel):
    pair_id: str
    value: float


class EmbedResponse(BaseModel):
    model: str
    pooling: str
    backend: str
    checkpoint: str | None
    vectors: list[PairVector]


class SimilarityResponse(BaseModel):
    model: str
    pooling: str
    backend: str
    checkpoint: str | None
    similarity: str = "cosine-of-pooled"
    scores: list[PairScore]


def create_app(config: ServiceConfig) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if not config.lazy:
            for name in config.models:
                load_encoder(name)
        yield

    app = FastAPI(title="embedsvc", version="0.1.0", lifespan=lifespan)
    app.state.config = config
    app.state.encoders = {}

    def load_encoder(name: str):
        if name in app.state.encoders:
            return app.state.encoders[name]
        spec = config.models[name]
        encoder = build_encoder(spec, cache_dir=config.cache_dir)
        app.state.encoders[name] = encoder
        return encoder

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def resolve(body) -> tuple:
        """Shared request gate: model known, loadable, batch within cap."""
        if body.model not in config.models:
            return None, JSONResponse(
                status_code=404, content={"detail": f"unknown model {body.model!r}"}
            )
        if len(body.pairs) > config.max_batch:
            return None, JSONResponse(
                status_code=400,
                content={"detail": f"batch of {len(body.pairs)} exceeds max {config.max_batch}"},
            )
        try:
            return load_encoder(body.model), None
        except Exception as e:
            return None, JSONResponse(
                status_code=503, content={"detail": f"model loading failed: {e}"}
            )

    @app.get("/healthz")
    async def healthz():
        loaded = set(app.state.encoders)
        if loaded >= set(config.models):
            return {"status": "ok", "models": sorted(loaded)}
        return JSONResponse(
            status_code=503,
            content={"status": "loading", "loaded": sorted(loaded),
                     "pending": sorted(set(config.models) - loaded)},
        )

    @app.post("/v1/cls-embeddings", response_model=EmbedResponse)
    async def cls_embeddings(body: EmbedRequest):
        encoder, error = resolve(body)
        if error:
            return error
        vectors = [
            PairVector(
                pair_id=p.pair_id,
                values=encoder.encode(encode_pair_text(p.left, p.right), body.pooling).tolist(),
            )
            for p in body.pairs
        ]
        return EmbedResponse(
            model=body.model, pooling=body.pooling, backend=encoder.backend,
            checkpoint=encoder.checkpoint, vectors=vectors,
        )

    @app.post("/v1/pair-similarities", response_model=SimilarityResponse)
    async def pair_similarities(body: SimilarityRequest):
        encoder, error = resolve(body)
        if error:
            return error
        scores = [
            PairScore(
                pair_id=p.pair_id,
                value=pair_similarity(encoder, p.left, p.right, body.pooling),
            )
            for p in body.pairs
        ]
        return SimilarityResponse(
            model=body.model, pooling=body.pooling, backend=encoder.backend,
            checkpoint=encoder.checkpoint, scores=scores,
        )

    return app
