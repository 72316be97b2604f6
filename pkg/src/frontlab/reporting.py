"""Deterministic report persistence and static plot emission."""

from __future__ import annotations

import datetime
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import __version__
from .experiments import ExperimentReport
from .tracking import FrontTrace, WaveProfileSnapshot


@dataclass
class RunManifest:
    config_hash: str
    tool_version: str
    started: str
    finished: str
    files: list  # [{"name", "sha256", "bytes"}]

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "started": self.started,
            "finished": self.finished,
            "files": self.files,
        }


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_csv(path: Path, columns: dict):
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    n = len(arrays[0])
    if any(len(a) != n for a in arrays):
        raise ValueError("CSV columns must share a length")
    data = np.column_stack(arrays)
    np.savetxt(path, data, delimiter=",", header=",".join(names),
               comments="", fmt="%.17g")


def emit_report(report: ExperimentReport, out_dir) -> RunManifest:
    """Write report.json, the series CSVs and manifest.json into out_dir.

    Identical report objects produce byte-identical payload files, so the
    manifest checksums are reproducible.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()

    written = []
    report_path = out / "report.json"
    report_path.write_text(json.dumps(report.to_dict(), indent=2,
                                      sort_keys=True) + "\n")
    written.append(report_path)

    for name, columns in report.series.items():
        if name == "spectrum":
            cols = {"frequency": columns["frequency"],
                    "power": columns["power"]}
            path = out / "spectrum.csv"
        else:
            cols = columns
            path = out / f"{name}.csv"
        _write_csv(path, cols)
        written.append(path)

    finished = datetime.datetime.now(datetime.timezone.utc).isoformat()
    manifest = RunManifest(
        config_hash=report.provenance.get("config_hash", ""),
        tool_version=__version__,
        started=started,
        finished=finished,
        files=[{"name": p.name, "sha256": _sha256(p),
                "bytes": p.stat().st_size} for p in written],
    )
    (out / "manifest.json").write_text(
        json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")
    return manifest


def verify_manifest(out_dir) -> bool:
    """Recompute checksums of the files listed in manifest.json."""
    out = Path(out_dir)
    manifest = json.loads((out / "manifest.json").read_text())
    for entry in manifest["files"]:
        path = out / entry["name"]
        if not path.exists() or _sha256(path) != entry["sha256"]:
            return False
    return True


def emit_plot(obj, path, *, module_points=None):
    """Static SVG line plot of a trace, profile snapshot or spectrum."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4))
    try:
        if isinstance(obj, FrontTrace):
            if len(obj.times) == 0:
                raise ValueError("empty trace")
            ax.plot(obj.times, obj.xi_theta, label=r"$\xi_\theta(t)$")
            if obj.xi_tilde is not None:
                ax.plot(obj.times, obj.xi_tilde, label=r"$\tilde\xi(t)$")
            ax.set_xlabel("t")
            ax.set_ylabel("interface position")
            ax.legend()
        elif isinstance(obj, WaveProfileSnapshot):
            if len(obj.offsets) == 0:
                raise ValueError("empty profile")
            ax.plot(obj.offsets, obj.values, label=r"$\psi(t,x)$")
            theta = float(obj.values[obj.center_index])
            ax.axhline(theta, color="gray", linestyle=":",
                       label=rf"$\theta={theta:.3g}$")
            ax.set_xlabel("x (relative to interface)")
            ax.set_ylabel("state")
            ax.legend()
        elif isinstance(obj, dict) and "frequency" in obj:
            freqs = np.asarray(obj["frequency"], dtype=float)
            power = np.asarray(obj["power"], dtype=float)
            if freqs.size == 0:
                raise ValueError("empty spectrum")
            ax.semilogy(freqs, np.maximum(power, 1e-30), label="power")
            if module_points is not None:
                for f in module_points:
                    ax.axvline(f, color="gray", alpha=0.3, linewidth=0.7)
            ax.set_xlabel("frequency")
            ax.set_ylabel("power")
            ax.legend()
        elif isinstance(obj, dict) and "t" in obj:
            names = [k for k in obj if k != "t"]
            if len(obj["t"]) == 0:
                raise ValueError("empty series")
            for name in names:
                ax.plot(obj["t"], obj[name], label=name)
            ax.set_xlabel("t")
            ax.legend()
        else:
            raise TypeError(f"cannot plot object of type {type(obj).__name__}")
        fig.tight_layout()
        fig.savefig(path, format="svg")
    finally:
        plt.close(fig)
    return path
