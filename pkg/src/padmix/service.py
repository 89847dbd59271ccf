"""Local HTTP service for the interactive adjustment/satisfaction loop.

Items are decomposed once at startup; dial positions are rendered on
demand, cached, and served as WAV bytes with the metering carried in
response headers. Ratings land in an append-only line-delimited JSON
log, and the summary endpoint aggregates them raw and post-screened
(sessions that ever used the negative half of the satisfaction scale
are dropped from the screened aggregate).
"""

from __future__ import annotations

import json
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel, Field

from .audio_io import AudioBuffer, read_wav, wav_bytes
from .loudness import integrated_loudness
from .pipeline import MATCH_INPUT, PipelineConfig, decompose_pad, upmix_render
from .upmix import NUM_DIAL_POSITIONS

SCHEMA_VERSION = 1
SATISFACTION_MIN, SATISFACTION_MAX = -15, 15
# display convention for -inf rear-to-front ratios in aggregates
RFR_DISPLAY_FLOOR_DB = -30.0
FOLD_REAR_GAIN = 0.7  # about -3 dB; stereo monitoring convenience only

CLASS_TAGS = ("speech", "singing", "non-voice", "unclassified")


@dataclass
class ItemState:
    item_id: str
    title: str
    class_tag: str
    source: AudioBuffer
    primary: AudioBuffer
    ambient: AudioBuffer
    target_lufs: float

    def entry(self) -> dict:
        return {
            "item_id": self.item_id,
            "title": self.title,
            "duration_s": round(self.source.duration_s, 3),
            "class_tag": self.class_tag,
        }


class Rating(BaseModel):
    session_id: str = Field(min_length=1)
    item_id: str
    final_dial: int
    satisfaction: int
    trace: list[tuple[int, float]] = Field(default_factory=list)


@dataclass
class RenderCache:
    """LRU of serialized renders bounded by a byte budget; the per-key
    metrics stay cached unconditionally (they are tiny) so summaries
    never re-render evicted audio."""

    max_bytes: int = 256 * 1024 * 1024
    blobs: OrderedDict = field(default_factory=OrderedDict)
    metrics: dict = field(default_factory=dict)
    total: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)
    key_locks: dict = field(default_factory=dict)

    def key_lock(self, key) -> threading.Lock:
        with self.lock:
            return self.key_locks.setdefault(key, threading.Lock())

    def get(self, key):
        with self.lock:
            if key in self.blobs:
                self.blobs.move_to_end(key)
                return self.blobs[key]
        return None

    def put(self, key, blob: bytes):
        with self.lock:
            if key in self.blobs:
                return
            self.blobs[key] = blob
            self.total += len(blob)
            while self.total > self.max_bytes and len(self.blobs) > 1:
                _, old = self.blobs.popitem(last=False)
                self.total -= len(old)


def _load_items(item_dir: Path, cfg: PipelineConfig) -> dict[str, ItemState]:
    wavs = sorted(item_dir.glob("*.wav"))
    if not wavs:
        raise RuntimeError(f"no .wav items found in {item_dir}")
    sidecar = {}
    meta_path = item_dir / "items.json"
    if meta_path.exists():
        sidecar = json.loads(meta_path.read_text())
    items: dict[str, ItemState] = {}
    for path in wavs:
        buf = read_wav(path)
        if buf.channels != 2:
            raise RuntimeError(f"{path.name}: items must be stereo")
        item_id = path.stem
        meta = sidecar.get(item_id, {})
        class_tag = meta.get("class_tag", "unclassified")
        if class_tag not in CLASS_TAGS:
            class_tag = "unclassified"
        primary, ambient = decompose_pad(buf, cfg)
        target = cfg.loudness_target
        if target == MATCH_INPUT:
            target = integrated_loudness(buf)
        items[item_id] = ItemState(
            item_id=item_id,
            title=meta.get("title", item_id),
            class_tag=class_tag,
            source=buf,
            primary=primary,
            ambient=ambient,
            target_lufs=target,
        )
    return items


def _fold_stereo(quad: AudioBuffer) -> AudioBuffer:
    samples = np.stack(
        [
            quad.samples[0] + FOLD_REAR_GAIN * quad.samples[2],
            quad.samples[1] + FOLD_REAR_GAIN * quad.samples[3],
        ]
    )
    return AudioBuffer(samples, quad.sample_rate)


def _lower_median(values: list[float]) -> float:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def _quartiles(values: list[int]) -> list[float]:
    return [float(v) for v in np.percentile(values, [25, 50, 75], method="lower")]


def create_app(
    item_dir,
    log_path=None,
    cfg: PipelineConfig | None = None,
    cache_bytes: int = 256 * 1024 * 1024,
    ui_dir=None,
) -> FastAPI:
    cfg = cfg or PipelineConfig()
    item_dir = Path(item_dir)
    items = _load_items(item_dir, cfg)
    log_file = Path(log_path) if log_path else item_dir / "sessions.jsonl"
    cache = RenderCache(max_bytes=cache_bytes)
    log_lock = threading.Lock()

    ratings: list[dict] = []
    if log_file.exists():
        for line in log_file.read_text().splitlines():
            if line.strip():
                ratings.append(json.loads(line))

    app = FastAPI(title="padmix audition service")
    app.state.items = items
    app.state.cache = cache

    def rendered(item_id: str, dial: int, fold: str) -> tuple[bytes, dict]:
        key = (item_id, dial, fold)
        blob = cache.get(key)
        if blob is not None:
            return blob, cache.metrics[(item_id, dial)]
        with cache.key_lock(key):
            blob = cache.get(key)
            if blob is not None:
                return blob, cache.metrics[(item_id, dial)]
            state = items[item_id]
            quad = upmix_render(
                state.source,
                dial,
                cfg,
                components=(state.primary, state.ambient),
            )
            metrics = {
                "rfr_db": quad.rfr_db,
                "loudness_lufs": quad.loudness_lufs,
                "norm_gain_db": quad.norm_gain_db,
                "dial_index": dial,
            }
            out = _fold_stereo(quad.audio) if fold == "stereo" else quad.audio
            blob, _ = wav_bytes(out, "float32")
            cache.metrics[(item_id, dial)] = metrics
            cache.put(key, blob)
            return blob, metrics

    def entry_rfr(item_id: str, dial: int) -> float:
        if (item_id, dial) not in cache.metrics:
            rendered(item_id, dial, "quad")
        return cache.metrics[(item_id, dial)]["rfr_db"]

    @app.get("/healthz")
    def healthz():
        return {"schema_version": SCHEMA_VERSION, "status": "ok", "items": len(items)}

    @app.get("/items")
    def list_items():
        return {
            "schema_version": SCHEMA_VERSION,
            "items": [items[k].entry() for k in sorted(items)],
        }

    @app.get("/render")
    def get_render(item: str, dial: int, fold: str = "quad"):
        if item not in items:
            raise HTTPException(status_code=404, detail=f"unknown item {item!r}")
        if not 0 <= dial < NUM_DIAL_POSITIONS:
            raise HTTPException(status_code=400, detail="dial outside 0..30")
        if fold not in ("quad", "stereo"):
            raise HTTPException(status_code=400, detail="fold must be quad or stereo")
        blob, metrics = rendered(item, dial, fold)
        headers = {
            "X-Schema-Version": str(SCHEMA_VERSION),
            "X-Rfr-Db": f"{metrics['rfr_db']:.4f}"
            if np.isfinite(metrics["rfr_db"])
            else "-inf",
            "X-Loudness-Lufs": f"{metrics['loudness_lufs']:.4f}",
            "X-Norm-Gain-Db": f"{metrics['norm_gain_db']:.4f}",
            "X-Dial-Index": str(dial),
            "X-Fold": fold,
        }
        return Response(content=blob, media_type="audio/wav", headers=headers)

    @app.post("/rating")
    def post_rating(rating: Rating):
        if rating.item_id not in items:
            raise HTTPException(status_code=404, detail="unknown item")
        if not 0 <= rating.final_dial < NUM_DIAL_POSITIONS:
            raise HTTPException(status_code=400, detail="final_dial outside 0..30")
        if not SATISFACTION_MIN <= rating.satisfaction <= SATISFACTION_MAX:
            raise HTTPException(
                status_code=400,
                detail=f"satisfaction outside {SATISFACTION_MIN}..{SATISFACTION_MAX}",
            )
        record = {
            "schema_version": SCHEMA_VERSION,
            "session_id": rating.session_id,
            "item_id": rating.item_id,
            "final_dial": rating.final_dial,
            "satisfaction": rating.satisfaction,
            "timestamp": time.time(),
            "adjustment_trace": [[int(d), float(t)] for d, t in rating.trace],
        }
        with log_lock:
            with open(log_file, "a") as fh:
                fh.write(json.dumps(record) + "\n")
            ratings.append(record)
        return {"schema_version": SCHEMA_VERSION, "status": "ok", "count": len(ratings)}

    def aggregate(entries: list[dict]) -> dict:
        if not entries:
            return {"n": 0, "median_final_rfr_db": None, "satisfaction_quartiles": None}
        rfrs = [
            max(entry_rfr(e["item_id"], e["final_dial"]), RFR_DISPLAY_FLOOR_DB)
            for e in entries
        ]
        return {
            "n": len(entries),
            "median_final_rfr_db": _lower_median(rfrs),
            "satisfaction_quartiles": _quartiles([e["satisfaction"] for e in entries]),
        }

    @app.get("/summary")
    def get_summary():
        with log_lock:
            snapshot = list(ratings)
        # latest rating wins per (session, item)
        latest: dict[tuple, dict] = {}
        for r in snapshot:
            latest[(r["session_id"], r["item_id"])] = r
        entries = list(latest.values())
        bad_sessions = {r["session_id"] for r in snapshot if r["satisfaction"] < 0}
        screened = [e for e in entries if e["session_id"] not in bad_sessions]

        def by_class(pool):
            out = {"overall": aggregate(pool)}
            for tag in CLASS_TAGS:
                subset = [e for e in pool if items[e["item_id"]].class_tag == tag]
                if subset:
                    out[tag] = aggregate(subset)
            return out

        raw = by_class(entries)
        post = by_class(screened)
        raw["overall"]["post_screened_n"] = len(screened)
        return {
            "schema_version": SCHEMA_VERSION,
            "rfr_display_floor_db": RFR_DISPLAY_FLOOR_DB,
            "raw": raw,
            "post_screened": post,
        }

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # mounted last so the API routes above keep precedence
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
