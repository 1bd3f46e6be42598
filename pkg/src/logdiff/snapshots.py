"""State and trajectory persistence.

Snapshot format, one state per file:

    # logdiff-state t=<time> n=<N>
    s_0,U_0
    ...

Values are written with repr so save/load round-trips bitwise. A trajectory
is a directory of snapshots plus a manifest CSV listing (index, time, file);
the manifest carries the config hash comment like every other CSV artifact.
Loaders never modify files in place.
"""

import csv
import hashlib
import os
import re

import numpy as np

from .geometry import ConformalState, LogPolarGrid
from .solver import BoundarySchedule, SolverConfig, Trajectory

__all__ = [
    "save_state",
    "load_state",
    "save_trajectory",
    "load_trajectory",
    "write_rows_csv",
    "read_rows_csv",
    "hash_comment",
]

_HEADER = re.compile(r"^# logdiff-state t=(?P<t>[^ ]+) n=(?P<n>\d+)$")


def hash_comment(payload: str) -> str:
    """Comment row recording the config hash; identical inputs give identical
    artifacts, which is what makes re-runs byte-for-byte reproducible."""
    return "# config-hash=" + hashlib.sha1(payload.encode()).hexdigest()[:12]


def save_state(state: ConformalState, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# logdiff-state t={state.time!r} n={state.grid.n}\n")
        for s, u in zip(state.grid.nodes, state.values):
            fh.write(f"{float(s)!r},{float(u)!r}\n")


def load_state(path) -> ConformalState:
    with open(path) as fh:
        first = fh.readline().rstrip("\n")
        m = _HEADER.match(first)
        if m is None:
            raise ValueError(f"{path}: not a logdiff-state file (header {first!r})")
        t = float(m.group("t"))
        n = int(m.group("n"))
        s = np.empty(n)
        u = np.empty(n)
        for i in range(n):
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: expected {n} rows, file ended at {i}")
            a, b = line.split(",")
            s[i] = float(a)
            u[i] = float(b)
        if fh.readline().strip():
            raise ValueError(f"{path}: trailing data after {n} rows")
    return ConformalState(grid=LogPolarGrid(s), values=u, time=t)


def save_trajectory(traj: Trajectory, out_dir, stem: str = "snap", hash_payload: str = "") -> str:
    """Writes one snapshot per sample time plus <stem>_manifest.csv.
    Returns the manifest path."""
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for i, state in enumerate(traj.states):
        name = f"{stem}_{i:03d}.txt"
        save_state(state, os.path.join(out_dir, name))
        rows.append({"index": i, "time": repr(state.time), "file": name})
    manifest = os.path.join(out_dir, f"{stem}_manifest.csv")
    write_rows_csv(manifest, ["index", "time", "file"], rows, hash_payload or stem)
    return manifest


def load_trajectory(manifest_path) -> Trajectory:
    """Rebuilds a Trajectory from a manifest. The boundary schedule is not
    stored on disk, so the loaded trajectory carries a from-disk placeholder;
    estimates only consume grids, times and values."""
    base = os.path.dirname(manifest_path)
    states = []
    with open(manifest_path) as fh:
        reader = csv.DictReader(row for row in fh if not row.startswith("#"))
        if reader.fieldnames is None or "file" not in reader.fieldnames:
            raise ValueError(f"{manifest_path}: not a trajectory manifest")
        for row in reader:
            states.append(load_state(os.path.join(base, row["file"])))
    if not states:
        raise ValueError(f"{manifest_path}: empty manifest")
    first = states[0]
    sched = BoundarySchedule(
        inner=lambda t, u0=float(first.values[0]): u0,
        outer=lambda t, u1=float(first.values[-1]): u1,
        label="from-disk",
    )
    return Trajectory(states=tuple(states), schedule=sched, config=SolverConfig())


def write_rows_csv(path, fieldnames, rows, hash_payload: str) -> None:
    """CSV artifact convention: hash comment first, then header, then rows.
    Floats are written with repr; everything else with str."""
    with open(path, "w", newline="") as fh:
        fh.write(hash_comment(hash_payload) + "\n")
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            out = {}
            for k in fieldnames:
                v = row[k]
                out[k] = repr(v) if isinstance(v, float) else v
            writer.writerow(out)


def read_rows_csv(path) -> list:
    """Reads an artifact written by write_rows_csv, skipping comment rows."""
    with open(path) as fh:
        reader = csv.DictReader(row for row in fh if not row.startswith("#"))
        return list(reader)
