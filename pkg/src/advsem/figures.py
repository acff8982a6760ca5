"""Matplotlib rendering for the report path.

The analysis module emits delimited data; these helpers turn it into the
figures the report directory ships alongside that data.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["render_fig3_png", "render_success_rates_png"]


def render_fig3_png(fig3_json_path: str | Path, out_path: str | Path) -> None:
    """Two-panel frequency overlay: top labels of the originals with the
    adversarial counts dashed, and vice versa."""
    data = json.loads(Path(fig3_json_path).read_text(encoding="utf-8"))
    rows = data["rows"]
    ori_rows = [r for r in rows if r["in_ori_topk"]]
    adv_rows = [r for r in rows if r["in_adv_topk"]]
    ori_rows.sort(key=lambda r: (-r["ori_count"], r["label"]))
    adv_rows.sort(key=lambda r: (-r["adv_count"], r["label"]))

    fig, axes = plt.subplots(1, 2, figsize=(12, 4.5))
    panels = [
        (axes[0], ori_rows, "ori_count", "adv_count", "top labels of original images"),
        (axes[1], adv_rows, "adv_count", "ori_count", "top labels of adversarial images"),
    ]
    for ax, panel_rows, solid_key, dashed_key, title in panels:
        labels = [r["label"] for r in panel_rows]
        x = range(len(labels))
        ax.plot(x, [r[solid_key] for r in panel_rows], "o-", label=solid_key[:3])
        ax.plot(x, [r[dashed_key] for r in panel_rows], "s--", label=dashed_key[:3])
        ax.set_xticks(list(x))
        ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
        ax.set_ylabel("occurrences")
        ax.set_title(f"{data['service']}: {title}")
        ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def render_success_rates_png(rows: list[dict], out_path: str | Path) -> None:
    """Grouped bars of success rate per (service, mode) across versions."""
    versions = ["ori", "ce", "potrip", "logit"]
    groups = []
    for service in ("object_localization", "label_detection"):
        for mode in ("non_targeted", "targeted"):
            rates = {
                r["version"]: r["success_rate"]
                for r in rows
                if r["service"] == service and r["mode"] == mode
            }
            groups.append((f"{service}\n{mode}", [rates.get(v, 0.0) for v in versions]))

    fig, ax = plt.subplots(figsize=(9, 4.5))
    width = 0.2
    for vi, version in enumerate(versions):
        xs = [gi + (vi - 1.5) * width for gi in range(len(groups))]
        ax.bar(xs, [g[1][vi] for g in groups], width=width, label=version)
    ax.set_xticks(range(len(groups)))
    ax.set_xticklabels([g[0] for g in groups], fontsize=8)
    ax.set_ylabel("success rate (%)")
    ax.set_title("semantic-mismatch success rates")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
