"""Dial-sweep measurement report: delimited metrics plus rendered figures.

Decomposes an item once, renders and normalizes all 31 dial positions,
and writes a CSV of the per-dial metrics next to a PNG summarizing the
rear-to-front ratio and normalization gain across the dial range.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .audio_io import AudioBuffer
from .loudness import integrated_loudness
from .pipeline import MATCH_INPUT, PipelineConfig, decompose_pad
from .upmix import DialSetting, NUM_DIAL_POSITIONS, normalize_render, render

RFR_PLOT_FLOOR_DB = -30.0

CSV_FIELDS = ("dial_index", "region", "param", "rfr_db", "loudness_lufs", "norm_gain_db")


def sweep_metrics(buf: AudioBuffer, cfg: PipelineConfig | None = None) -> list[dict]:
    """Per-dial metric rows for all 31 normalized renders of one item."""
    cfg = cfg or PipelineConfig()
    primary, ambient = decompose_pad(buf, cfg)
    target = cfg.loudness_target
    if target == MATCH_INPUT:
        target = integrated_loudness(buf)
    rows = []
    for i in range(NUM_DIAL_POSITIONS):
        dial = DialSetting.from_index(i)
        quad = normalize_render(render(buf, primary, ambient, dial), target)
        rows.append(
            {
                "dial_index": i,
                "region": dial.region,
                "param": dial.param,
                "rfr_db": quad.rfr_db,
                "loudness_lufs": quad.loudness_lufs,
                "norm_gain_db": quad.norm_gain_db,
            }
        )
    return rows


def write_csv(rows: list[dict], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def write_figure(rows: list[dict], path: Path, title: str = "") -> None:
    dials = [r["dial_index"] for r in rows]
    rfrs = [max(r["rfr_db"], RFR_PLOT_FLOOR_DB) for r in rows]
    gains = [r["norm_gain_db"] for r in rows]

    fig, (ax_rfr, ax_gain) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax_rfr.plot(dials, rfrs, marker="o", ms=3)
    ax_rfr.axhline(0.0, color="gray", lw=0.6, ls=":")
    ax_rfr.set_ylabel(f"RFR [dB]\n(floor {RFR_PLOT_FLOOR_DB:.0f})")
    ax_rfr.grid(alpha=0.3)
    for x, region in ((4.5, "narrowing|relocation"), (20.5, "relocation|boost")):
        ax_rfr.axvline(x, color="k", lw=0.6, ls="--")
        ax_gain.axvline(x, color="k", lw=0.6, ls="--")
    ax_gain.plot(dials, gains, marker="s", ms=3, color="tab:orange")
    ax_gain.set_xlabel("dial position")
    ax_gain.set_ylabel("normalization gain [dB]")
    ax_gain.grid(alpha=0.3)
    if title:
        ax_rfr.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def dial_sweep_report(
    buf: AudioBuffer,
    out_dir,
    stem: str,
    cfg: PipelineConfig | None = None,
) -> dict:
    """Write <stem>.report.csv and <stem>.report.png; returns the rows."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = sweep_metrics(buf, cfg)
    csv_path = out_dir / f"{stem}.report.csv"
    png_path = out_dir / f"{stem}.report.png"
    write_csv(rows, csv_path)
    write_figure(rows, png_path, title=stem)
    return {"csv": str(csv_path), "figure": str(png_path), "rows": rows}
