import threading
import time

import pytest
import uvicorn

from lmbridge.app import create_app
from lmbridge.engine import HashedEmbedder, NgramEngine


@pytest.fixture(scope="session")
def bridge_url():
    app = create_app(engine=NgramEngine(), embedder=HashedEmbedder())
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("bridge server did not start")
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)
