"""Trace and report serialization."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .dynamics import Orbit, TruncatedOrbitError
from .graph import Graph, graph_to_json, to_dot


def trace_dict(g: Graph, orbit: Orbit) -> dict:
    return {
        "graph": graph_to_json(g),
        "n": orbit.n,
        "b": orbit.initial.b,
        "steps": [list(s) for s in orbit.trajectory],
        "transient": orbit.transient_length,
        "period": orbit.cycle_length,
        "sync_time": orbit.sync_time,
        "pulls": [list(p) for p in orbit.pull_events],
        "blinks": {str(v): ts for v, ts in orbit.blink_times.items()},
        "truncated": orbit.truncated,
    }


def dumps(obj) -> str:
    """Stable JSON text: insertion-ordered keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2) + "\n"


def trace_csv(orbit: Orbit) -> str:
    if orbit.truncated:
        raise TruncatedOrbitError("csv export needs a complete orbit")
    vertex_count = len(orbit.initial)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", *[f"x{v}" for v in range(vertex_count)], "constant", "pulls"])
    pulls_at = {}
    for t, _, _ in orbit.pull_events:
        pulls_at[t] = pulls_at.get(t, 0) + 1
    for t, s in enumerate(orbit.trajectory):
        w.writerow([t, *s, int(len(set(s)) == 1), pulls_at.get(t, 0)])
    return buf.getvalue()


def export_trace(g: Graph, orbit: Orbit, fmt: str, path: str | Path) -> list[Path]:
    """Write an orbit as ``json``, ``csv`` or ``dot_frames`` (a directory of DOT files)."""
    path = Path(path)
    if fmt == "json":
        path.write_text(dumps(trace_dict(g, orbit)))
        return [path]
    if fmt == "csv":
        path.write_text(trace_csv(orbit))
        return [path]
    if fmt == "dot_frames":
        path.mkdir(parents=True, exist_ok=True)
        written = []
        for t, s in enumerate(orbit.trajectory):
            frame = path / f"frame_{t:04d}.dot"
            frame.write_text(to_dot(g, [f"{v}:{x}" for v, x in enumerate(s)], name=f"t{t}"))
            written.append(frame)
        return written
    raise ValueError(f"unknown trace format {fmt!r}")
