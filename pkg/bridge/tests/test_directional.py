"""Directional trend checks requiring a real pretrained model.

These cannot run hermetically: they need downloaded model weights, which
this environment does not provide. Set BRIDGE_MODEL to a causal-LM name
(e.g. "gpt2") to enable them; see scripts/directional_check.py for the
standalone runner.
"""

import os
import threading
import time

import pytest
import uvicorn

requires_model = pytest.mark.skipif(
    os.environ.get("BRIDGE_MODEL", "offline") in ("", "offline"),
    reason="needs BRIDGE_MODEL set to a pretrained causal LM",
)


@requires_model
def test_directional_trends():
    from lmbridge.app import create_app
    from lmbridge.serve import build_embedder, build_engine

    model = os.environ["BRIDGE_MODEL"]
    app = create_app(engine=build_engine(model), embedder=build_embedder(model))
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.05)
    port = server.servers[0].sockets[0].getsockname()[1]
    try:
        import subprocess
        import sys
        script = os.path.join(os.path.dirname(__file__), "..", "scripts",
                              "directional_check.py")
        proc = subprocess.run(
            [sys.executable, script, f"http://127.0.0.1:{port}",
             "--per-cell", os.environ.get("BRIDGE_PER_CELL", "50")],
            capture_output=True, text=True, timeout=3600 * 4,
        )
        print(proc.stdout)
        assert proc.returncode == 0, proc.stdout + proc.stderr
    finally:
        server.should_exit = True
        thread.join(timeout=5)
