import pytest
from fastapi.testclient import TestClient

from sitetwin import fixtures
from sitetwin.service import ProjectStore, create_app


@pytest.fixture()
def client(tmp_path):
    store = ProjectStore(str(tmp_path / "proj"))
    store.init_demo()
    return TestClient(create_app(store))


@pytest.fixture()
def run_client(tmp_path):
    store = ProjectStore(str(tmp_path / "proj"))
    store.init_demo()
    c = TestClient(create_app(store))
    for week in (1, 2, 3):
        assert c.post(f"/week/{week}/run", json={}).status_code == 200
    return c


def test_project_summary(client):
    body = client.get("/project").json()
    assert body["project_id"] == "dfw-midrise"
    assert len(body["activities"]) == 18
    assert body["classification"]["weighted_f1"] == pytest.approx(0.88, abs=0.02)


def test_forecast_on_fresh_project_is_prior(client):
    body = client.get("/forecast").json()
    assert body["series"] == []
    assert body["prior"]["p50"] == pytest.approx(120.0, abs=1.0)


def test_week_run_and_forecast_series(run_client):
    body = run_client.get("/forecast").json()
    assert [row["week"] for row in body["series"]] == [1, 2, 3]
    assert body["series"][0]["p50"] == pytest.approx(120.0, abs=1.0)


def test_run_week_out_of_order_rejected(client):
    assert client.post("/week/5/run", json={}).status_code == 400


def test_stale_version_write_conflict(client):
    v = client.get("/project").json()["version"]
    ok = client.post("/week/1/run", json={"expected_version": v})
    assert ok.status_code == 200
    stale = client.post("/week/2/run", json={"expected_version": v})
    assert stale.status_code == 409


def test_every_mutation_returns_new_version(client):
    v0 = client.get("/project").json()["version"]
    r = client.post("/week/1/run", json={})
    assert r.json()["version"] > v0


def test_decision_flow_and_conflicts(run_client):
    recs = run_client.get("/recommendations").json()["recommendations"]
    proposed = [r for r in recs if r["status"] == "proposed"]
    assert proposed
    target = proposed[0]["action_id"]
    version = run_client.get("/project").json()["version"]
    ok = run_client.post(f"/recommendations/{target}/decision",
                         json={"adopted": True, "expected_version": version})
    assert ok.status_code == 200
    assert ok.json()["version"] == version + 1
    # deciding again conflicts
    again = run_client.post(f"/recommendations/{target}/decision",
                            json={"adopted": False, "reason": "flip"})
    assert again.status_code == 409
    # stale-version write rejected
    other = proposed[1]["action_id"] if len(proposed) > 1 else target
    stale = run_client.post(f"/recommendations/{other}/decision",
                            json={"adopted": False, "expected_version": version})
    assert stale.status_code == 409


def test_ingest_schema_violation_names_row(client):
    r = client.post("/ingest/evm",
                    json={"payload": "period,pv,ev,ac\n1,100,oops,90\n"})
    assert r.status_code == 422
    assert r.json()["detail"]["row"] == 2
    assert r.json()["detail"]["column"] == "ev"


def test_ingest_unknown_kind(client):
    assert client.post("/ingest/telemetry", json={"payload": "x"}).status_code == 400


def test_evm_endpoint(client):
    body = client.get("/evm").json()
    assert [m["period"] for m in body["metrics"]] == [1, 2, 3, 4]
    assert body["metrics"][0]["spi"] == pytest.approx(0.92, abs=0.005)
    assert body["curves"]["crossover"] == 3
    assert len(body["quantities"]) == 5


def test_buffers_and_criticality_endpoints(run_client):
    buf = run_client.get("/buffers").json()
    assert buf["project_buffer_size"] == 20.0
    assert len(buf["weeks"]) == 3
    crit = run_client.get("/criticality").json()
    assert "A020" in crit["latest"]
    assert 0.0 <= crit["latest"]["A020"] <= 100.0


def test_scenario_evaluate_and_tornado(client):
    payloads = fixtures.load_scenarios()
    for p in payloads[:3]:
        r = client.post("/scenarios/evaluate",
                        json={"scenario": p, "n": 2000, "seed": 11})
        assert r.status_code == 200
    rows = client.get("/tornado").json()["rows"]
    assert len(rows) == 3
    assert rows[0]["rank"] == 1
    assert abs(rows[0]["d_finish_p50"]) >= abs(rows[-1]["d_finish_p50"])


def test_scenario_bad_perturbation_rejected(client):
    r = client.post("/scenarios/evaluate",
                    json={"scenario": {"name": "x", "perturbations":
                          [{"type": "wormhole"}]}})
    assert r.status_code == 400


def test_hypotheses_endpoint_requires_full_replay(run_client):
    assert run_client.get("/hypotheses").status_code == 409


def test_hypotheses_after_full_replay(tmp_path):
    store = ProjectStore(str(tmp_path / "p2"))
    store.init_demo()
    client = TestClient(create_app(store))
    for week in range(1, 17):
        r = client.post(f"/week/{week}/run", json={}).json()
        plan = store.twin().decision_plan.get(week)
        if plan:
            client.post(f"/recommendations/{plan['action_id']}/decision",
                        json={"adopted": plan["adopted"],
                              "reason": plan.get("reason", "")})
    body = client.get("/hypotheses").json()
    verdicts = {h["hypothesis"]: h["verdict"] for h in body["hypotheses"]}
    assert verdicts["H1"] == "met"
    assert verdicts["H3"] == "partially met"


def test_ablation_endpoint(client):
    body = client.get("/ablation", params={"components": "bayes"}).json()
    assert body["row"]["components_removed"] == ["bayes"]
    series = body["row"]["weekly_p50"]
    assert max(series) - min(series) < 1e-9


def test_store_persists_events_across_reload(tmp_path):
    store = ProjectStore(str(tmp_path / "p3"))
    store.init_demo()
    c = TestClient(create_app(store))
    c.post("/week/1/run", json={})
    v = store.twin().version
    fingerprint = store.twin().fingerprint()

    reloaded = ProjectStore(str(tmp_path / "p3"))
    c2 = TestClient(create_app(reloaded))
    assert c2.get("/project").json()["version"] == v
    assert reloaded.twin().fingerprint() == fingerprint
