"""Render demo timelines and bench scaling curves to files.

Every figure is written next to a CSV holding the same rows, so the
numbers stay inspectable without an image viewer.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_KIND_STYLE = {
    "edit": ("o", "tab:blue"),
    "revert": ("v", "tab:red"),
    "sync": ("s", "tab:purple"),
    "reports": ("D", "tab:green"),
    "rejected": ("x", "tab:orange"),
    "expect": ("*", "tab:olive"),
    "status": (".", "0.65"),
}


def write_timeline(events, out_dir) -> tuple[Path, Path]:
    """Plot one lane per member over milliseconds; returns (png, csv)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    csv_path = out_dir / "timeline.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["atMillis", "member", "kind", "detail"])
        for event in events:
            writer.writerow([event.at_millis, event.member, event.kind, event.detail])

    members = sorted({e.member for e in events}) or ["(no events)"]
    lanes = {name: i for i, name in enumerate(members)}
    fig, ax = plt.subplots(figsize=(10, 1.6 + 1.1 * len(members)))
    seen = {}
    for event in events:
        marker, color = _KIND_STYLE.get(event.kind, ("o", "0.3"))
        handle = ax.scatter(event.at_millis, lanes[event.member],
                            marker=marker, color=color, s=70, zorder=3)
        seen.setdefault(event.kind, handle)
    ax.set_yticks(range(len(members)))
    ax.set_yticklabels(members)
    ax.set_ylim(-0.6, len(members) - 0.4)
    ax.set_xlabel("milliseconds since start")
    ax.set_title("awareness timeline")
    ax.grid(axis="x", linestyle=":", alpha=0.5)
    if seen:
        ax.legend(seen.values(), seen.keys(), loc="upper left",
                  bbox_to_anchor=(1.01, 1.0), frameon=False)
    fig.tight_layout()
    png_path = out_dir / "timeline.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return png_path, csv_path


def write_scaling(rows, out_dir) -> tuple[Path, Path]:
    """Plot detection time against total change volume; returns (png, csv).

    rows: iterables of (total_changes, n_members, millis).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [tuple(row) for row in rows]

    csv_path = out_dir / "scaling.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["totalChanges", "nMembers", "millis"])
        writer.writerows(rows)

    fig, ax = plt.subplots(figsize=(7, 5))
    totals = [r[0] for r in rows]
    millis = [r[2] for r in rows]
    ax.plot(totals, millis, marker="o", color="tab:blue", label="measured")
    if len(rows) >= 2 and totals[0] > 0:
        linear = [millis[0] * t / totals[0] for t in totals]
        ax.plot(totals, linear, linestyle="--", color="0.5", label="linear from first point")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("total changes across members")
    ax.set_ylabel("detection time (ms)")
    ax.set_title(f"detection scaling ({rows[0][1] if rows else 0} members)")
    ax.grid(True, which="both", linestyle=":", alpha=0.5)
    ax.legend(frameon=False)
    fig.tight_layout()
    png_path = out_dir / "scaling.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return png_path, csv_path
