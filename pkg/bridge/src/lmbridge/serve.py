"""Entry point: configure an engine from the environment and serve.

BRIDGE_MODEL   "offline" (default) for the hermetic hashed engine, or a
               HuggingFace causal-LM name such as "gpt2".
BRIDGE_EMBEDDER "offline" (default) or a HuggingFace model name.
BRIDGE_PORT    listen port (default 8080).
"""

from __future__ import annotations

import argparse
import os

import uvicorn

from .app import create_app
from .engine import HashedEmbedder, NgramEngine


def build_engine(model: str):
    if model == "offline":
        return NgramEngine()
    from .hf_engine import HFEngine
    return HFEngine(model_name=model)


def build_embedder(model: str):
    if model == "offline":
        return HashedEmbedder()
    from .hf_engine import HFEmbedder
    return HFEmbedder(model_name=model)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int,
                        default=int(os.environ.get("BRIDGE_PORT", "8080")))
    parser.add_argument("--model",
                        default=os.environ.get("BRIDGE_MODEL", "offline"))
    parser.add_argument("--embedder",
                        default=os.environ.get("BRIDGE_EMBEDDER", "offline"))
    parser.add_argument("--concurrency", type=int, default=4)
    args = parser.parse_args(argv)

    app = create_app(
        engine=build_engine(args.model),
        embedder=build_embedder(args.embedder),
        max_concurrency=args.concurrency,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
