"""Run configuration: INI files with [map], [basis] and [run] sections.

Example::

    [map]
    matrix = 0,0; 2,0
    translation = sqrt2, sqrt2

    [basis]
    pi = pi

    [run]
    seed = 24301
    N = 1000000

The environment variable POLYERG_SEED overrides the seed from any source.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Optional

from .affine import UnipotentAffineMap
from .boxes import DEFAULT_SEED
from .symbolic import parse_symbolic, register_basis

SEED_ENV = "POLYERG_SEED"


class ConfigError(ValueError):
    pass


def parse_matrix(text: str) -> tuple[tuple[int, ...], ...]:
    """``"0,0; 2,0"`` -> ((0, 0), (2, 0))."""
    try:
        rows = tuple(tuple(int(x) for x in row.split(",")) for row in text.split(";") if row.strip())
    except ValueError as exc:
        raise ConfigError(f"bad matrix {text!r}: {exc}") from None
    return rows


def parse_vector(text: str):
    return tuple(parse_symbolic(x) for x in text.split(",") if x.strip())


@dataclass
class RunConfig:
    subcommand: str = ""
    params: dict = field(default_factory=dict)
    map_matrix: Optional[str] = None
    map_translation: Optional[str] = None
    basis: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    seed_source: str = "default"
    source_file: Optional[str] = None

    def build_map(self, default_translation: str = "sqrt2") -> UnipotentAffineMap:
        translation = self.map_translation or default_translation
        b = parse_vector(translation)
        if self.map_matrix:
            N = parse_matrix(self.map_matrix)
        else:
            N = tuple((0,) * len(b) for _ in b)
        try:
            return UnipotentAffineMap(N, b)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "params": self.params,
            "map": {"matrix": self.map_matrix, "translation": self.map_translation},
            "basis": dict(sorted(self.basis.items())),
            "seed": self.seed,
            "seed_source": self.seed_source,
        }

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def load_config(path: Optional[str]) -> RunConfig:
    cfg = RunConfig()
    if path:
        parser = configparser.ConfigParser()
        parser.optionxform = str  # keep key case (basis names, N)
        if not parser.read(path):
            raise ConfigError(f"cannot read config file {path!r}")
        cfg.source_file = path
        if parser.has_section("basis"):
            for name, expr in parser.items("basis"):
                cfg.basis[name] = expr
                register_basis(name, expr)
        if parser.has_section("map"):
            cfg.map_matrix = parser.get("map", "matrix", fallback=None)
            cfg.map_translation = parser.get("map", "translation", fallback=None)
        if parser.has_section("run"):
            for key, value in parser.items("run"):
                if key == "seed":
                    cfg.seed = _int(value, "seed")
                    cfg.seed_source = "config"
                else:
                    cfg.params[key] = value
    env = os.environ.get(SEED_ENV)
    if env:
        cfg.seed = _int(env, SEED_ENV)
        cfg.seed_source = "env"
    return cfg


def _int(text: str, what: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise ConfigError(f"{what} must be an integer, got {text!r}") from None
