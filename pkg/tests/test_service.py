import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from padmix import AudioBuffer, write_wav
from padmix.service import create_app


def _make_corpus(root, n_items=2, seconds=0.6):
    rng = np.random.default_rng(101)
    meta = {}
    for i in range(n_items):
        n = int(seconds * 48000)
        s = 0.3 * rng.standard_normal(n)
        x = np.stack([0.7 * s, 0.7 * s]) + 0.1 * rng.standard_normal((2, n))
        write_wav(root / f"item{i}.wav", AudioBuffer(x, 48000), "float32")
        meta[f"item{i}"] = {
            "title": f"Test item {i}",
            "class_tag": "speech" if i % 2 == 0 else "non-voice",
        }
    (root / "items.json").write_text(json.dumps(meta))


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    _make_corpus(root)
    app = create_app(root, log_path=root / "log.jsonl")
    with TestClient(app) as c:
        c.log_path = root / "log.jsonl"
        yield c


def test_healthz(client):
    body = client.get("/healthz").json()
    assert body["status"] == "ok"
    assert body["schema_version"] == 1
    assert body["items"] == 2


def test_items_listing(client):
    body = client.get("/items").json()
    assert body["schema_version"] == 1
    ids = [e["item_id"] for e in body["items"]]
    assert ids == ["item0", "item1"]
    assert body["items"][0]["class_tag"] == "speech"
    assert body["items"][0]["title"] == "Test item 0"
    assert body["items"][0]["duration_s"] == pytest.approx(0.6, abs=0.01)


def test_empty_corpus_rejected(tmp_path):
    with pytest.raises(RuntimeError, match="no .wav items"):
        create_app(tmp_path)


def test_unclassified_default(tmp_path):
    _make_corpus(tmp_path, n_items=1)
    (tmp_path / "items.json").unlink()
    app = create_app(tmp_path)
    with TestClient(app) as c:
        assert c.get("/items").json()["items"][0]["class_tag"] == "unclassified"


def test_render_is_cached_and_deterministic(client):
    r1 = client.get("/render", params={"item": "item0", "dial": 12})
    r2 = client.get("/render", params={"item": "item0", "dial": 12})
    assert r1.status_code == 200
    assert r1.headers["content-type"] == "audio/wav"
    assert r1.content == r2.content
    assert r1.headers["X-Dial-Index"] == "12"
    assert float(r1.headers["X-Loudness-Lufs"]) == pytest.approx(
        float(r2.headers["X-Loudness-Lufs"])
    )


def test_render_dial5_reference_headers(client):
    r = client.get("/render", params={"item": "item0", "dial": 5})
    assert r.headers["X-Rfr-Db"] == "-inf"


def test_render_fold_down_is_stereo(client, tmp_path):
    quad = client.get("/render", params={"item": "item0", "dial": 25})
    fold = client.get("/render", params={"item": "item0", "dial": 25, "fold": "stereo"})
    from padmix.audio_io import read_wav as _read

    (tmp_path / "q.wav").write_bytes(quad.content)
    (tmp_path / "f.wav").write_bytes(fold.content)
    q = _read(tmp_path / "q.wav")
    f = _read(tmp_path / "f.wav")
    assert q.channels == 4
    assert f.channels == 2
    want = q.samples[0] + 0.7 * q.samples[2]
    assert np.allclose(f.samples[0], want, atol=1e-6)


def test_render_unknown_item_404(client):
    assert client.get("/render", params={"item": "missing", "dial": 3}).status_code == 404


def test_render_bad_dial_400(client):
    assert client.get("/render", params={"item": "item0", "dial": 31}).status_code == 400


def test_rating_round_trip_and_summary_screening(client):
    ok = client.post("/rating", json={
        "session_id": "s1", "item_id": "item0", "final_dial": 20,
        "satisfaction": 5, "trace": [[5, 0.0], [12, 1.5], [20, 3.0]],
    })
    assert ok.status_code == 200
    # s1 re-rates item0: latest wins in the summary
    client.post("/rating", json={
        "session_id": "s1", "item_id": "item0", "final_dial": 25, "satisfaction": 10,
    })
    # s2 used the negative scale once: excluded from the screened set
    client.post("/rating", json={
        "session_id": "s2", "item_id": "item1", "final_dial": 5, "satisfaction": -3,
    })
    body = client.get("/summary").json()
    assert body["schema_version"] == 1
    assert body["raw"]["overall"]["n"] == 2
    assert body["raw"]["overall"]["post_screened_n"] == 1
    assert body["post_screened"]["overall"]["n"] == 1
    # screened aggregate only contains s1's latest (dial 25, satisfaction 10)
    assert body["post_screened"]["overall"]["satisfaction_quartiles"][1] == 10
    # dial-5 entry in raw reports the -inf RFR at the -30 display floor
    assert body["raw"]["non-voice"]["median_final_rfr_db"] == -30.0
    # log file is append-only JSONL
    lines = client.log_path.read_text().strip().splitlines()
    assert len(lines) == 3
    assert json.loads(lines[0])["adjustment_trace"] == [[5, 0.0], [12, 1.5], [20, 3.0]]


def test_rating_out_of_range_rejected(client):
    bad = client.post("/rating", json={
        "session_id": "s3", "item_id": "item0", "final_dial": 5, "satisfaction": 16,
    })
    assert bad.status_code == 400
    bad_dial = client.post("/rating", json={
        "session_id": "s3", "item_id": "item0", "final_dial": 31, "satisfaction": 0,
    })
    assert bad_dial.status_code == 400


def test_ui_mount_serves_static_frontend(tmp_path):
    _make_corpus(tmp_path, n_items=1)
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<!doctype html><title>audition</title>")
    app = create_app(tmp_path, ui_dir=ui)
    with TestClient(app) as c:
        page = c.get("/")
        assert page.status_code == 200
        assert "audition" in page.text
        # API routes keep precedence over the static mount
        assert c.get("/healthz").json()["status"] == "ok"


def test_summary_empty_is_empty(tmp_path):
    _make_corpus(tmp_path, n_items=1)
    app = create_app(tmp_path)
    with TestClient(app) as c:
        body = c.get("/summary").json()
        assert body["raw"]["overall"]["n"] == 0
        assert body["raw"]["overall"]["median_final_rfr_db"] is None
