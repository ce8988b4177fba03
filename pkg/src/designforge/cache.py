"""On-disk quadrature cache plus a small index of achieved build sizes.

Cache keys bucket the tolerance by its decimal exponent, so re-runs at the
same tolerance magnitude reuse solves.  Writes are atomic
(write-temp-then-rename) and idempotent: storing the same key twice leaves
one file.  Corrupt entries are ignored with a warning and rebuilt.
"""
from __future__ import annotations

import json
import math
import os
import warnings
from pathlib import Path

from .quadrature import Quadrature


def atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


class QuadratureCache:
    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.quad_dir = self.root / "quadratures"
        self.quad_dir.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(m: int, n: int, t: int, tol: float) -> str:
        return f"m{m}_n{n}_t{t}_e{round(math.log10(tol))}"

    def _path(self, m: int, n: int, t: int, tol: float) -> Path:
        return self.quad_dir / (self.key(m, n, t, tol) + ".json")

    def lookup(self, m: int, n: int, t: int, tol: float) -> Quadrature | None:
        path = self._path(m, n, t, tol)
        if not path.exists():
            return None
        try:
            data = json.loads(path.read_text())
            q = Quadrature.from_json_dict(data)
        except (ValueError, KeyError, TypeError) as exc:
            warnings.warn(f"ignoring corrupt cache entry {path}: {exc}")
            return None
        if not q.certified or (q.weight.m, q.weight.n, q.degree) != (m, n, t):
            return None
        q.tolerance = tol
        return q

    def store(self, q: Quadrature) -> None:
        if not q.certified:
            return
        path = self._path(q.weight.m, q.weight.n, q.degree, q.tolerance)
        atomic_write_text(path, dump_json(q.to_json_dict()))

    # -- achieved build cardinalities, consumed by the bounds table --------

    @property
    def _builds_path(self) -> Path:
        return self.root / "builds.json"

    def record_build(self, n: int, t: int, cardinality: int) -> None:
        data = {}
        if self._builds_path.exists():
            try:
                data = json.loads(self._builds_path.read_text())
            except ValueError:
                data = {}
        data[f"n{n}_t{t}"] = cardinality
        atomic_write_text(self._builds_path, dump_json(dict(sorted(data.items()))))

    def achieved(self, n: int, t: int) -> int | None:
        if not self._builds_path.exists():
            return None
        try:
            data = json.loads(self._builds_path.read_text())
        except ValueError:
            return None
        value = data.get(f"n{n}_t{t}")
        return int(value) if value is not None else None
