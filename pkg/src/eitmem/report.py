"""Scenario output: CSV tables, PGM images with sidecars, figures, and the run manifest."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .pgm import encode_pgm, to_uint16

MANIFEST = "manifest.jsonl"
METRIC_COLUMNS = ("photons_per_pulse", "channel", "V", "R", "efficiency", "storage_time", "tau", "residual")


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


@dataclass
class ScenarioReport:
    scenario: str
    config_hash: str
    rows: list = field(default_factory=list)
    files: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def paths(self, role: str | None = None) -> list[str]:
        return [f["path"] for f in self.files if role is None or f["role"] == role]


class ReportWriter:
    """Writes files for one scenario run into ``out_dir`` and records them."""

    def __init__(self, out_dir: str | os.PathLike, scenario: str, config):
        self.out = Path(out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.report = ScenarioReport(scenario, config.hash)
        self._config = config

    def _put(self, name: str, data: bytes, role: str) -> str:
        path = self.out / name
        path.write_bytes(data)
        self.report.files.append({"path": name, "role": role, "scenario": self.report.scenario,
                                  "hash": sha256_bytes(data)})
        return name

    def csv(self, name: str, header, rows, role: str = "table") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        return self._put(name, buf.getvalue().encode(), role)

    def pgm8(self, name: str, image: np.ndarray, role: str = "image") -> str:
        return self._put(name, encode_pgm(image, 255), role)

    def pgm16(self, name: str, image: np.ndarray, metadata: dict, role: str = "image") -> str:
        """16-bit image plus a ``.txt`` sidecar of ``key = value`` lines."""
        raster, scale = to_uint16(image)
        out = self._put(name, encode_pgm(raster, 65535), role)
        meta = dict(metadata)
        meta["counts_per_level"] = scale
        text = "".join(f"{k} = {_fmt(meta[k])}\n" for k in sorted(meta))
        self._put(name.rsplit(".", 1)[0] + ".txt", text.encode(), "sidecar")
        return out

    def figure(self, name: str, fig) -> str:
        import matplotlib.pyplot as plt

        buf = io.BytesIO()
        fig.savefig(buf, format="png", dpi=110, metadata={"Software": None})
        plt.close(fig)
        return self._put(name, buf.getvalue(), "figure")

    def metrics(self, rows) -> str:
        self.report.rows.extend(rows)
        return self.csv(f"{self.report.scenario}_metrics.csv", METRIC_COLUMNS,
                        [[r.get(c) for c in METRIC_COLUMNS] for r in rows], role="metrics")

    def finish(self) -> ScenarioReport:
        snap = self._put(f"{self.report.scenario}_config.toml", self._config.canonical().encode(), "config")
        assert sha256_bytes((self.out / snap).read_bytes()) == self.report.config_hash
        manifest = self.out / MANIFEST
        kept = []
        if manifest.exists():
            for line in manifest.read_text().splitlines():
                if line.strip() and json.loads(line)["scenario"] != self.report.scenario:
                    kept.append(json.loads(line))
        entries = kept + [dict(e, config_hash=self.report.config_hash) for e in self.report.files]
        entries.sort(key=lambda e: (e["scenario"], e["path"]))
        manifest.write_text("".join(json.dumps(e, sort_keys=True) + "\n" for e in entries))
        return self.report


def read_manifest(out_dir: str | os.PathLike) -> list[dict]:
    path = Path(out_dir) / MANIFEST
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]


def verify_manifest(out_dir: str | os.PathLike) -> list[str]:
    """Paths whose current hash no longer matches the manifest."""
    bad = []
    for entry in read_manifest(out_dir):
        data = (Path(out_dir) / entry["path"]).read_bytes()
        if sha256_bytes(data) != entry["hash"]:
            bad.append(entry["path"])
    return bad
