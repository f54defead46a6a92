"""Deterministic JSON reports and CSV time series."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import __version__
from .config import RunConfig

SCHEMA = "polyerg.report/1"
CSV_COLUMNS = ("n_or_N", "empirical_re", "empirical_im", "analytic_re", "analytic_im", "abs_error")


def tagged(value, provenance: str) -> dict:
    """Attach a provenance label ("exact", "analytic", "empirical(N, seed)")."""
    return {"value": jsonable(value), "provenance": provenance}


def empirical_tag(N: int, seed: Optional[int] = None) -> str:
    return f"empirical({N}, {seed if seed is not None else 'deterministic'})"


def jsonable(x: Any):
    if isinstance(x, complex):
        return [_float(x.real), _float(x.imag)]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return _float(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_dict"):
        return jsonable(x.to_dict())
    if hasattr(x, "item"):  # numpy scalar
        return jsonable(x.item())
    return x


def _float(v: float):
    if math.isnan(v) or math.isinf(v):
        return str(v)
    return float(f"{v:.12g}")


@dataclass
class Report:
    subcommand: str
    config: RunConfig
    result: dict
    ok: bool = True
    messages: list = field(default_factory=list)
    wall_time: Optional[float] = None

    def to_dict(self) -> dict:
        prov = {"config_hash": self.config.hash(), "tool_version": __version__}
        if self.wall_time is not None:
            prov["wall_time_s"] = round(self.wall_time, 3)
        return {
            "schema": SCHEMA,
            "subcommand": self.subcommand,
            "config": jsonable(self.config.to_dict()),
            "result": jsonable(self.result),
            "verification_passed": self.ok,
            "messages": list(self.messages),
            "provenance": prov,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def fmt12(x: float) -> str:
    return f"{x:.12g}"


def write_csv(rows: Sequence[dict], path: Optional[str] = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        emp, ana = complex(r["empirical"]), complex(r["analytic"])
        w.writerow([r["N"], fmt12(emp.real), fmt12(emp.imag), fmt12(ana.real), fmt12(ana.imag),
                    fmt12(abs(emp - ana))])
    text = buf.getvalue()
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
