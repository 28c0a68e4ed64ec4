"""Figures written next to the delimited output of ``scan`` and ``wada-fixtures``."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STATUS_COLORS = {
    "verified": "tab:blue",
    "exempt": "tab:green",
    "no-divisibility": "tab:gray",
    "field-counterexample": "tab:red",
    "inconsistent": "black",
}


def _save(fig, path) -> None:
    # Fixed metadata keeps the PNG bytes stable between runs.
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def scan_figure(records: list[dict], path) -> None:
    """Class number against |disc| on log-log axes, one colour per status."""
    fig, ax = plt.subplots(figsize=(7, 5))
    plotted = [r for r in records if r.get("h")]
    for status, color in STATUS_COLORS.items():
        pts = [(abs(r["disc"]), r["h"]) for r in plotted if r["status"] == status]
        if pts:
            xs, ys = zip(*pts)
            ax.scatter(xs, ys, s=14, color=color, label=f"{status} ({len(pts)})")
    if plotted:
        lo = min(abs(r["disc"]) for r in plotted)
        hi = max(abs(r["disc"]) for r in plotted)
        xs = [lo * (hi / lo) ** (i / 50) for i in range(51)] if hi > lo else [lo]
        ax.plot(xs, [math.sqrt(x) / math.pi for x in xs], "k--", lw=0.8, label="sqrt|disc|/pi")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.legend(fontsize=8)
    ax.set_xlabel("|disc|")
    ax.set_ylabel("class number h")
    ax.set_title(f"{len(records)} records")
    fig.tight_layout()
    _save(fig, path)


def fixtures_figure(rows: list[dict], path) -> None:
    """Odd-heavy factor count per fixture row; counterexamples in red."""
    fig, ax = plt.subplots(figsize=(7, 4))
    labels = [str(r["row"]) for r in rows]
    counts = [r["odd_heavy"] for r in rows]
    colors = ["tab:red" if r["wada"] == "Counterexample" else "tab:blue" for r in rows]
    ax.bar(labels, counts, color=colors)
    ax.axhline(2.5, color="k", ls="--", lw=0.8)
    ax.set_xlabel("fixture row")
    ax.set_ylabel("factors with an odd part")
    ax.set_title("Wada classification of fixture structures")
    fig.tight_layout()
    _save(fig, path)
