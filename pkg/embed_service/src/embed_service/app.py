"""The embedding endpoint.

Wire protocol (consumed by the pipeline's service provider):

    POST /embed   {"asm_text": "<normalized assembly>"}
                  -> {"vector": [...d floats...], "d": int, "model_id": str}
    GET  /health  -> {"status": "ok", "d": int, "model_id": str}

Requests longer than the input cap are refused with 413; an empty
asm_text fails validation with 422. Handling is stateless, so concurrent
index builds can share one instance.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

MAX_INPUT_CHARS = 200_000


class EmbedRequest(BaseModel):
    asm_text: str = Field(min_length=1)


class EmbedResponse(BaseModel):
    vector: list[float]
    d: int
    model_id: str


class HealthResponse(BaseModel):
    status: str
    d: int
    model_id: str


def create_app(encoder) -> FastAPI:
    app = FastAPI(title="embed-service")

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", d=encoder.dimension, model_id=encoder.model_id)

    @app.post("/embed", response_model=EmbedResponse)
    def embed(request: EmbedRequest) -> EmbedResponse:
        if len(request.asm_text) > MAX_INPUT_CHARS:
            raise HTTPException(
                status_code=413,
                detail=f"input too long: {len(request.asm_text)} > {MAX_INPUT_CHARS} chars",
            )
        vector = encoder.encode(request.asm_text)
        return EmbedResponse(
            vector=[float(v) for v in vector],
            d=encoder.dimension,
            model_id=encoder.model_id,
        )

    return app
