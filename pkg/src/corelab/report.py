"""Deterministic text/JSON reports.

A report is a header (tool version, input digests, tolerance, seed) plus
named sections of ``key -> value`` rows.  Values are plain Python data;
floats and matrices are rounded on output so that identical inputs give
byte-identical reports.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .numerics import Tolerance, fix_phase


def _clean(x: float, digits: int) -> float:
    r = round(float(x), digits)
    return 0.0 if r == 0 else r


def _tidy(value, digits: int = 10):
    """Make ``value`` JSON-serialisable with rounded floats."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value):.6e}")
    if isinstance(value, (complex, np.complexfloating)):
        return [_clean(value.real, digits), _clean(value.imag, digits)]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value) and np.allclose(value.imag, 0, atol=10.0 ** -digits):
            value = value.real
        if np.iscomplexobj(value):
            return [_tidy(v, digits) for v in value]
        return [_tidy(v, digits) if isinstance(v, np.ndarray) else _clean(v, digits) for v in value]
    if isinstance(value, dict):
        return {str(k): _tidy(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_tidy(v, digits) for v in value]
    return value


def frame_rows(frame: np.ndarray, digits: int = 8) -> list:
    """Frame columns as phase-fixed, rounded vectors (one per basis vector)."""
    cols = [fix_phase(frame[:, j]) for j in range(frame.shape[1])]
    return [_tidy(c, digits) for c in cols]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.3e}"
    if isinstance(value, list) and value and isinstance(value[0], list):
        return json.dumps(value, separators=(",", ":"))
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(",", ":"))
    if value is None:
        return "-"
    return str(value)


@dataclass
class Section:
    title: str
    rows: list[tuple[str, object]] = field(default_factory=list)

    def add(self, key: str, value) -> "Section":
        self.rows.append((key, _tidy(value)))
        return self


@dataclass
class Report:
    command: str
    inputs: list[tuple[str, str]]          # (path, sha256)
    tol: Tolerance
    seed: int
    sections: list[Section] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    expectations: list[tuple[str, object, object, bool]] = field(default_factory=list)

    def section(self, title: str) -> Section:
        s = Section(title)
        self.sections.append(s)
        return s

    def expect(self, key: str, wanted, got, ok: bool) -> None:
        self.expectations.append((key, _tidy(wanted), _tidy(got), bool(ok)))

    @property
    def expectations_met(self) -> bool:
        return all(ok for *_, ok in self.expectations)

    def get(self, title: str, key: str):
        for s in self.sections:
            if s.title == title:
                for k, v in s.rows:
                    if k == key:
                        return v
        raise KeyError(f"{title}/{key}")

    def to_dict(self) -> dict:
        return {
            "tool": "corelab",
            "version": __version__,
            "command": self.command,
            "inputs": [{"path": p, "sha256": d} for p, d in self.inputs],
            "tolerance": self.tol.as_dict(),
            "seed": self.seed,
            "sections": {s.title: dict(s.rows) for s in self.sections},
            "warnings": list(self.warnings),
            "expectations": [{"key": k, "expected": w, "got": g, "ok": ok}
                             for k, w, g, ok in self.expectations],
            "expectations_met": self.expectations_met,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    def to_text(self) -> str:
        t = self.tol
        lines = [f"corelab {__version__} {self.command}"]
        for p, d in self.inputs:
            lines.append(f"input {p} sha256={d}")
        lines.append(f"tolerance eq_tol={t.eq_tol:g} psd_tol={t.psd_tol:g} rank_rel_tol={t.rank_rel_tol:g}")
        lines.append(f"seed {self.seed}")
        for s in self.sections:
            lines.append("")
            lines.append(f"[{s.title}]")
            width = max((len(k) for k, _ in s.rows), default=0)
            for k, v in s.rows:
                lines.append(f"  {k.ljust(width)}  {_fmt(v)}")
        if self.warnings:
            lines.append("")
            lines.append("[warnings]")
            lines.extend(f"  {w}" for w in self.warnings)
        if self.expectations:
            lines.append("")
            lines.append("[expectations]")
            for k, w, g, ok in self.expectations:
                lines.append(f"  {'ok  ' if ok else 'FAIL'}  {k}: expected {_fmt(w)}, got {_fmt(g)}")
        return "\n".join(lines) + "\n"
