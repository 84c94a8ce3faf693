"""FastAPI application implementing the wire protocol.

POST /generate {prompt, mode, top_p, beam_width, max_new_tokens, seed} -> {text}
POST /score    {prompt, continuation}                                  -> {logprob}
POST /embed    {texts}                                                 -> {vectors, dim}
GET  /health   200 when the engine is loaded, 503 before

All error responses are non-200 with a JSON body {"error": <message>}.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel


class GenerateRequest(BaseModel):
    prompt: str
    mode: str
    top_p: float = 0.5
    beam_width: int = 5
    max_new_tokens: int = 60
    seed: int = 0


class ScoreRequest(BaseModel):
    prompt: str
    continuation: str


class EmbedRequest(BaseModel):
    texts: list[str]


def create_app(engine=None, embedder=None, max_concurrency: int = 4) -> FastAPI:
    app = FastAPI(title="lm-bridge")
    app.state.engine = engine
    app.state.embedder = embedder
    semaphore = threading.BoundedSemaphore(max_concurrency)

    @app.exception_handler(RequestValidationError)
    async def bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    def _unready() -> JSONResponse:
        return JSONResponse(status_code=503, content={"error": "model not loaded"})

    @app.get("/health")
    def health():
        if app.state.engine is None:
            return _unready()
        return {"status": "ok"}

    @app.post("/generate")
    def generate(req: GenerateRequest):
        if app.state.engine is None:
            return _unready()
        try:
            with semaphore:
                text = app.state.engine.generate(
                    req.prompt, req.mode, req.top_p, req.beam_width,
                    req.max_new_tokens, req.seed,
                )
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        return {"text": text}

    @app.post("/score")
    def score(req: ScoreRequest):
        if app.state.engine is None:
            return _unready()
        try:
            with semaphore:
                logprob = app.state.engine.score(req.prompt, req.continuation)
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        return {"logprob": logprob}

    @app.post("/embed")
    def embed(req: EmbedRequest):
        if app.state.embedder is None:
            return _unready()
        try:
            with semaphore:
                vectors = app.state.embedder.embed(req.texts)
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        dim = len(vectors[0]) if vectors else 0
        return {"vectors": vectors, "dim": dim}

    return app
