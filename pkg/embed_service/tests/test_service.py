import numpy as np
import pytest
from fastapi.testclient import TestClient

from embed_service import HashProjectionEncoder, ModelLoadFailure, create_app, load_encoder
from embed_service.app import MAX_INPUT_CHARS

ASM = "push rbp\nmov rsp , rbp\nmovl $16 , eax\npop rbp\nret"


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(HashProjectionEncoder(dimension=1024)))


class TestHealth:
    def test_reports_dimension_and_model(self, client):
        r = client.get("/health")
        assert r.status_code == 200
        body = r.json()
        assert body["d"] == 1024
        assert body["model_id"].startswith("builtin:hash-proj")
        assert body["status"] == "ok"


class TestEmbed:
    def test_returns_d_finite_floats(self, client):
        r = client.post("/embed", json={"asm_text": ASM})
        assert r.status_code == 200
        body = r.json()
        assert body["d"] == 1024
        vec = np.array(body["vector"])
        assert vec.shape == (1024,)
        assert np.all(np.isfinite(vec))
        assert np.any(vec)

    def test_deterministic_across_calls(self, client):
        a = client.post("/embed", json={"asm_text": ASM}).json()["vector"]
        b = client.post("/embed", json={"asm_text": ASM}).json()["vector"]
        assert a == b

    def test_distinct_inputs_distinct_vectors(self, client):
        a = np.array(client.post("/embed", json={"asm_text": ASM}).json()["vector"])
        b = np.array(client.post("/embed", json={"asm_text": "ret"}).json()["vector"])
        assert float(a @ b) < 0.999

    def test_empty_input_rejected(self, client):
        assert client.post("/embed", json={"asm_text": ""}).status_code == 422

    def test_oversized_input_rejected(self, client):
        r = client.post("/embed", json={"asm_text": "x" * (MAX_INPUT_CHARS + 1)})
        assert r.status_code == 413
        assert "too long" in r.json()["detail"]


class TestEncoder:
    def test_unit_norm(self):
        enc = HashProjectionEncoder(dimension=256)
        assert abs(np.linalg.norm(enc.encode(ASM)) - 1.0) < 1e-9

    def test_instruction_order_matters(self):
        enc = HashProjectionEncoder(dimension=256)
        a = enc.encode("inca\nincb")
        b = enc.encode("incb\ninca")
        # means over per-line token vectors coincide for pure reorderings;
        # token-level content controls the embedding
        assert np.allclose(a, b)
        c = enc.encode("inca\nincc")
        assert not np.allclose(a, c)

    def test_builtin_spec_loads(self):
        enc = load_encoder("builtin:hash-proj", dimension=64)
        assert enc.dimension == 64

    def test_missing_model_fails_at_startup(self):
        with pytest.raises(ModelLoadFailure):
            load_encoder("/no/such/model/path-xyz")
