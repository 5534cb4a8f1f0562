"""HTTP service endpoints: model resolution, solving, invariants,
extension checks, and the verification report."""

import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from qesurf import service

client = TestClient(service.app)

N4_DICT = {"kind": "typeB", "C": {"111": -1.0, "122": -1.0, "221": 1.0}}


def test_list_models():
    data = client.get("/models").json()
    assert "N4" in data["labels"]
    assert "Z2" in data["families"]


def test_model_detail():
    data = client.get("/models/N4").json()
    assert data["killing_dim"] == 3
    assert data["model"]["kind"] == "typeB"
    assert data["expected"][0]["dim"] == 3
    assert client.get("/models/NOPE").status_code == 422


def test_info_endpoint():
    r = client.post("/info", json={"model": "N4"})
    assert r.status_code == 200
    data = r.json()
    assert data["flat"] is False
    assert data["strongly_projectively_flat"] is True
    assert data["killing_dim"] == 3
    assert data["ricci_signature"] == "negative"


def test_solve_with_registry_label():
    data = client.post("/solve", json={"model": "N4", "mu": -1.0}).json()
    assert data["dim"] == 3
    assert data["residual"] < 1e-9
    assert len(data["basis"]) == 3


def test_solve_with_inline_model_dict():
    data = client.post("/solve", json={"model": N4_DICT, "mu": 0.0}).json()
    assert data["dim"] == 1


def test_solve_with_family_parameters():
    data = client.post(
        "/solve", json={"model": "M2", "params": {"c": 3.0}, "mu": -1.0}
    ).json()
    assert data["dim"] == 3


def test_family_without_parameters_is_rejected():
    r = client.post("/solve", json={"model": "M2", "mu": -1.0})
    assert r.status_code == 422
    assert "parameters" in r.json()["detail"]


def test_unknown_label_suggests_nearest_name():
    r = client.post("/info", json={"model": "N44"})
    assert r.status_code == 422
    assert "did you mean" in r.json()["detail"]


def test_special_mu_endpoint():
    data = client.post("/special-mu", json={"model": "N1+"}).json()
    cands = {c["source"]: c for c in data["candidates"]}
    assert cands["normal-form"]["mu"] == pytest.approx(-0.25)
    assert cands["normal-form"]["dim"] == 2
    assert cands["constants"]["dim"] == 1


def test_special_mu_rejects_full_plane_model():
    assert client.post("/special-mu", json={"model": "M1"}).status_code == 422


def test_killing_dim_endpoint():
    data = client.post("/killing-dim", json={"model": "S2"}).json()
    assert data["killing_dim"] == 3


def test_classify_endpoint():
    data = client.post("/classify", json={"model": "Bpair+:c=-3/2"}).json()
    assert data["family"] == "N1-"


def test_extend_endpoint_picks_eigenfunction():
    data = client.post("/extend", json={"model": "N4", "mu": -1.0}).json()
    assert data["residual_qe"] < 1e-5
    assert data["residual_null"] < 1e-8


def test_extend_endpoint_kahler_family():
    data = client.post(
        "/extend", json={"model": "KS:c=1", "mu": 3.0, "f": "(x1)^3"}
    ).json()
    assert data["residual_qe"] < 1e-5
    assert data["kahler"] is not None
    assert data["kahler"]["nabla_J"] < 1e-5
    assert data["kahler"]["J_squared"] < 1e-5


def test_verify_endpoint_with_filter():
    data = client.post("/verify", json={"only": ["N4"]}).json()
    assert data["summary"]["entries"] == 1
    assert data["summary"]["ok"] is True
    assert data["entries"][0]["label"] == "N4"
    checks = data["entries"][0]["checks"]
    assert all(set(c) == {"name", "pass", "residual", "cite"} for c in checks)


def test_verify_endpoint_empty_filter_warns():
    data = client.post("/verify", json={"only": ["ZZZ*"]}).json()
    assert data["summary"]["entries"] == 0
    assert data["summary"]["ok"] is True
    assert data["summary"]["warnings"]
