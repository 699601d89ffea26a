"""FastAPI adapter for the generator wire protocol.

POST /generate   {prompt, n_candidates, max_new_tokens, top_k, nucleus,
                  temperature, stop_token, seed?} -> {candidates: [...]}
POST /perplexity {text} -> {ppl}
GET  /health     -> {ok: true}
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from genservice.model import MAX_CONTEXT, CausalLM


@dataclass(frozen=True)
class DecodeDefaults:
    top_k: int = 40
    nucleus: float = 1.0
    temperature: float = 1.0


@dataclass(frozen=True)
class ServiceConfig:
    model_seed: int = 1234
    device: str = "cpu"
    decode: DecodeDefaults = field(default_factory=DecodeDefaults)
    max_prompt_length: int = MAX_CONTEXT
    port: int = 8000


class GenerateRequest(BaseModel):
    prompt: str
    n_candidates: int = Field(default=10, ge=1, le=64)
    max_new_tokens: int = Field(default=128, ge=1)
    top_k: int | None = Field(default=None, ge=0)
    nucleus: float | None = Field(default=None, gt=0.0, le=1.0)
    temperature: float | None = Field(default=None, ge=0.0)
    stop_token: str = "<|endoftext|>"
    seed: int | None = None


class GenerateResponse(BaseModel):
    candidates: list[str]


class PerplexityRequest(BaseModel):
    text: str


class PerplexityResponse(BaseModel):
    ppl: float


def create_app(config: ServiceConfig = ServiceConfig()) -> FastAPI:
    app = FastAPI(title="genservice")
    lm = CausalLM(weight_seed=config.model_seed)

    @app.get("/health")
    def health():
        return {"ok": True}

    @app.post("/generate", response_model=GenerateResponse)
    def generate(request: GenerateRequest):
        if request.max_new_tokens >= config.max_prompt_length:
            raise HTTPException(
                status_code=422,
                detail="max_new_tokens leaves no room for the prompt")
        decode = config.decode
        top_k = decode.top_k if request.top_k is None else request.top_k
        nucleus = (decode.nucleus if request.nucleus is None
                   else request.nucleus)
        temperature = (decode.temperature if request.temperature is None
                       else request.temperature)
        try:
            candidates = [
                lm.sample(request.prompt, request.max_new_tokens, top_k,
                          nucleus, temperature, request.stop_token,
                          seed=(None if request.seed is None
                                else request.seed * 10007 + i))
                for i in range(request.n_candidates)
            ]
        except Exception as exc:  # model failure -> 5xx, not a crash
            raise HTTPException(status_code=500,
                                detail=f"generation failed: {exc}") from exc
        return GenerateResponse(candidates=candidates)

    @app.post("/perplexity", response_model=PerplexityResponse)
    def perplexity(request: PerplexityRequest):
        if not request.text:
            raise HTTPException(status_code=422, detail="text is empty")
        try:
            return PerplexityResponse(ppl=lm.perplexity(request.text))
        except Exception as exc:
            raise HTTPException(status_code=500,
                                detail=f"scoring failed: {exc}") from exc

    return app


def main(argv: list[str] | None = None) -> int:
    import uvicorn

    parser = argparse.ArgumentParser(prog="genservice")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--model-seed", type=int, default=1234)
    args = parser.parse_args(argv)
    config = ServiceConfig(model_seed=args.model_seed, port=args.port)
    uvicorn.run(create_app(config), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
