"""File reports: matplotlib figures rendered alongside delimited output.

Each ``write_*`` helper drops a small bundle into a directory: the JSON
produced by the corresponding operation, a CSV view of the tabular part,
and a PNG figure.  Figures use the non-interactive Agg backend so reports
work in headless environments.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402

from .semantics import ReductionGraph, graph_json  # noqa: E402


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_graph_report(g: ReductionGraph, outdir: str | Path,
                       basename: str = "graph") -> list[Path]:
    """Render a reduction graph as JSON, CSV tables, and a PNG drawing."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    payload = graph_json(g)
    files = []

    jpath = out / f"{basename}.json"
    _write_json(jpath, payload)
    files.append(jpath)

    spath = out / f"{basename}-states.csv"
    with spath.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "term", "barbs"])
        for st in payload["states"]:
            w.writerow([st["id"], st["term"], " ".join(st["barbs"])])
    files.append(spath)

    epath = out / f"{basename}-edges.csv"
    with epath.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["from", "to", "kind", "endpoints"])
        for e in payload["edges"]:
            w.writerow([e["from"], e["to"], e["kind"],
                        " ".join(e["endpoints"])])
    files.append(epath)

    dg = nx.MultiDiGraph()
    dg.add_nodes_from(st["id"] for st in payload["states"])
    for e in payload["edges"]:
        dg.add_edge(e["from"], e["to"])
    fig, ax = plt.subplots(figsize=(7, 7))
    pos = nx.spring_layout(dg, seed=7)
    colors = ["#c44" if st["id"] == 0 else "#8ab"
              for st in payload["states"]]
    nx.draw_networkx(dg, pos, ax=ax, node_color=colors, font_size=8,
                     node_size=420, arrowsize=12)
    ax.set_title(f"{len(payload['states'])} states, "
                 f"{len(payload['edges'])} edges"
                 + (" (truncated)" if payload["truncated"] else ""))
    ax.axis("off")
    ppath = out / f"{basename}.png"
    fig.savefig(ppath, dpi=150, bbox_inches="tight")
    plt.close(fig)
    files.append(ppath)
    return files


def write_campaign_report(payload: dict, outdir: str | Path,
                          basename: str = "campaign") -> list[Path]:
    """Render a campaign report as JSON, CSV, and a summary bar chart."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    files = []

    jpath = out / f"{basename}.json"
    _write_json(jpath, payload)
    files.append(jpath)

    cpath = out / f"{basename}.csv"
    with cpath.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["category", "term"])
        for wit in payload["witnesses"]:
            w.writerow(["witness", wit["term"]])
        for fail in payload["failures"]:
            w.writerow(["failure", fail["term"]])
    files.append(cpath)

    counts = {
        "checked": payload["checked"],
        "witnesses": len(payload["witnesses"]),
        "failures": len(payload["failures"]),
        "inconclusive": payload["inconclusive"],
    }
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(list(counts), list(counts.values()),
           color=["#8ab", "#ca4", "#c44", "#999"])
    ax.set_title(f"campaign {payload['property']}")
    ax.set_ylabel("count")
    for i, v in enumerate(counts.values()):
        ax.text(i, v, str(v), ha="center", va="bottom", fontsize=9)
    ppath = out / f"{basename}.png"
    fig.savefig(ppath, dpi=150, bbox_inches="tight")
    plt.close(fig)
    files.append(ppath)
    return files


def write_electoral_report(payload: dict, outdir: str | Path,
                           basename: str = "electoral") -> list[Path]:
    """Render an electoral verdict as JSON, a leader CSV, and a chart of
    how often each id wins."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    files = []

    jpath = out / f"{basename}.json"
    _write_json(jpath, payload)
    files.append(jpath)

    cpath = out / f"{basename}.csv"
    with cpath.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["execution", "leader"])
        for row in payload.get("leader-table", []):
            w.writerow([" ".join(str(e) for e in row["execution"]),
                        row["leader"]])
    files.append(cpath)

    wins: dict[str, int] = {}
    for row in payload.get("leader-table", []):
        wins[row["leader"]] = wins.get(row["leader"], 0) + 1
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if wins:
        ids = sorted(wins)
        ax.bar(ids, [wins[i] for i in ids], color="#8ab")
        for i, name in enumerate(ids):
            ax.text(i, wins[name], str(wins[name]), ha="center",
                    va="bottom", fontsize=9)
    ax.set_title(f"verdict: {payload['status']}")
    ax.set_ylabel("executions won")
    ppath = out / f"{basename}.png"
    fig.savefig(ppath, dpi=150, bbox_inches="tight")
    plt.close(fig)
    files.append(ppath)
    return files
