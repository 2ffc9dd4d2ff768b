"""Bundled stub provider: deterministic embeddings and chat endpoints.

Lets the remote clients be exercised over real HTTP without external
services. The requested model name selects the behavior, which makes
error paths reachable from contract tests:

  embeddings: "stub-embed" echoes builtin trigram embeddings;
              "wrong-count" drops the last vector; "wrong-dim" truncates
              each vector; "boom" answers 500.
  chat:       "stub-steps" answers a fixed two-step plan; "prose" answers
              unnumbered prose; "empty" answers nothing; "echo-steps"
              extracts the instruction line and wraps it as step 1;
              "boom" answers 500.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .embedding import embed

STUB_PLAN = "1. pick up the letter tile 'A' and place it in the blank slot\n2. pick up the letter tile 'R' and place it next to the letter tile 'C'"


def build_stub_app(dimension: int = 512) -> FastAPI:
    app = FastAPI(title="twolane-stub", version="0.1.0")

    @app.post("/v1/embeddings")
    async def embeddings(request: Request):
        body = await request.json()
        model = body.get("model", "")
        texts = body.get("input", [])
        if model == "boom":
            return PlainTextResponse("stub exploded", status_code=500)
        vectors = [embed(t or "empty", dimension) for t in texts]
        if model == "wrong-count" and vectors:
            vectors = vectors[:-1]
        data = []
        for i, vec in enumerate(vectors):
            values = vec.tolist()
            if model == "wrong-dim":
                values = values[: dimension // 2]
            data.append({"index": i, "embedding": values})
        return JSONResponse({"object": "list", "model": model, "data": data})

    @app.post("/v1/chat/completions")
    async def chat(request: Request):
        body = await request.json()
        model = body.get("model", "")
        prompt = (body.get("messages") or [{}])[-1].get("content", "")
        if model == "boom":
            return PlainTextResponse("stub exploded", status_code=500)
        if model == "prose":
            content = "I would just move things around until it looks right."
        elif model == "empty":
            content = ""
        elif model == "echo-steps":
            instruction = ""
            for line in prompt.splitlines():
                if line.startswith("instruction:"):
                    instruction = line.partition(":")[2].strip()
            content = f"1. {instruction}"
        else:
            content = STUB_PLAN
        return JSONResponse(
            {"choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]}
        )

    return app


def serve_stub(host: str = "127.0.0.1", port: int = 8799, dimension: int = 512) -> None:
    import uvicorn

    uvicorn.run(build_stub_app(dimension), host=host, port=port, log_level="warning")
