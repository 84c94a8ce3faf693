"""Wire-protocol conformance, exercised through the consumer's HTTP client."""

import pytest
import requests
from fastapi.testclient import TestClient

from chainruler.backends import (
    DecodingPolicy,
    GenerationRequest,
    HttpBackend,
    TransportError,
)
from lmbridge.app import create_app
from lmbridge.engine import NgramEngine


class TestHealth:
    def test_ready(self, bridge_url):
        resp = requests.get(f"{bridge_url}/health", timeout=5)
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok"}

    def test_unready_is_503(self):
        client = TestClient(create_app(engine=None, embedder=None))
        resp = client.get("/health")
        assert resp.status_code == 503
        assert "error" in resp.json()

    def test_unready_endpoints_refuse(self):
        client = TestClient(create_app(engine=None, embedder=None))
        resp = client.post("/score", json={"prompt": "a", "continuation": "b"})
        assert resp.status_code == 503


class TestGenerateRoundTrip:
    def test_nucleus(self, bridge_url):
        backend = HttpBackend(bridge_url)
        req = GenerationRequest("Here is what we know: Jill is green.",
                                DecodingPolicy(mode="nucleus", seed=3,
                                               max_new_tokens=30))
        text = backend.generate(req)
        assert isinstance(text, str) and len(text) == 30
        assert backend.generate(req) == text

    def test_beam(self, bridge_url):
        backend = HttpBackend(bridge_url)
        req = GenerationRequest("Here is what we know: Jill is green.",
                                DecodingPolicy(mode="beam", beam_width=3,
                                               max_new_tokens=20))
        assert backend.generate(req) == backend.generate(req)

    def test_bad_mode_is_transport_error(self, bridge_url):
        backend = HttpBackend(bridge_url, retries=0)
        resp = requests.post(f"{bridge_url}/generate",
                             json={"prompt": "x", "mode": "greedy"}, timeout=5)
        assert resp.status_code == 400
        assert "error" in resp.json()

    def test_missing_field_is_non_200(self, bridge_url):
        resp = requests.post(f"{bridge_url}/generate",
                             json={"mode": "beam"}, timeout=5)
        assert resp.status_code != 200
        assert "error" in resp.json()


class TestScoreRoundTrip:
    def test_matches_engine(self, bridge_url):
        backend = HttpBackend(bridge_url)
        direct = NgramEngine().score("Jill is green. ", "Jill is guilty.")
        assert backend.score_continuation(
            "Jill is green. ", "Jill is guilty.") == pytest.approx(direct)

    def test_additivity_within_tolerance(self, bridge_url):
        backend = HttpBackend(bridge_url)
        prompt = "Here is what we know: Jill is green. "
        a, b = "Therefore, ", "Jill is guilty."
        whole = backend.score_continuation(prompt, a + b)
        split = (backend.score_continuation(prompt, a)
                 + backend.score_continuation(prompt + a, b))
        assert abs(whole - split) <= 1e-4

    def test_empty_continuation_is_error(self, bridge_url):
        backend = HttpBackend(bridge_url, retries=0)
        with pytest.raises(TransportError):
            backend.score_continuation("x", "")


class TestEmbedRoundTrip:
    def test_vectors_and_dim(self, bridge_url):
        backend = HttpBackend(bridge_url)
        vectors = backend.embed(["Jill is guilty.", "Jill is innocent."])
        assert len(vectors) == 2
        assert len(vectors[0]) == len(vectors[1]) == 384

    def test_deterministic(self, bridge_url):
        backend = HttpBackend(bridge_url)
        assert backend.embed(["same text"]) == backend.embed(["same text"])

    def test_dim_field_reported(self, bridge_url):
        resp = requests.post(f"{bridge_url}/embed",
                             json={"texts": ["hello"]}, timeout=5)
        body = resp.json()
        assert body["dim"] == len(body["vectors"][0]) == 384

    def test_empty_batch_is_error(self, bridge_url):
        resp = requests.post(f"{bridge_url}/embed", json={"texts": []}, timeout=5)
        assert resp.status_code == 400
