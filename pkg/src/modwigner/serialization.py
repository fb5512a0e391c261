"""The "mw1" document format and canonical keys for module elements.

A document is JSON text::

    {"version": "mw1", "d": 2, "n": 3,
     "payload": {"name": {"kind": "module", "value": ...}, ...}}

Complex numbers are written as ``[re, im]`` pairs.  Layouts by kind:

* ``scalar``    one pair
* ``algebra``   d rows of d pairs (row-major)
* ``module``    n slots of d pairs (column-major by slot)
* ``operator``  n rows of n pairs (row-major)
* ``module_list`` / ``scalar_list`` / ``algebra_list``  lists of the above
* ``real``, ``int``, ``text``  plain JSON values

Every float is rounded to 12 significant digits on the way in and out,
so read -> write -> read is bit-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ModWignerError, ShapeMismatch

VERSION = "mw1"
SIG_DIGITS = 12

KINDS = ("scalar", "algebra", "module", "operator", "module_list", "scalar_list",
         "algebra_list", "real", "int", "text")


class MalformedDocument(ModWignerError, ValueError):
    pass


def canonical_float(x: float) -> float:
    return float(f"{float(x):.{SIG_DIGITS - 1}e}") + 0.0


def canonical_array(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    flat = [complex(canonical_float(z.real), canonical_float(z.imag)) for z in a.reshape(-1)]
    return np.array(flat, dtype=complex).reshape(a.shape)


def canonical_key(a) -> bytes:
    """Hashable key of an array after 12-significant-digit rounding."""
    c = canonical_array(a)
    return repr(c.shape).encode() + c.astype(np.complex128).tobytes()


def _pair(z) -> list[float]:
    z = complex(z)
    return [canonical_float(z.real), canonical_float(z.imag)]


def _unpair(p) -> complex:
    if not (isinstance(p, (list, tuple)) and len(p) == 2):
        raise MalformedDocument(f"expected an [re, im] pair, got {p!r}")
    try:
        return complex(canonical_float(p[0]), canonical_float(p[1]))
    except (TypeError, ValueError) as exc:
        raise MalformedDocument(f"non-numeric pair {p!r}") from exc


def _grid(rows, nrows, ncols, what):
    if not isinstance(rows, list) or len(rows) != nrows:
        raise ShapeMismatch(f"{what}: expected {nrows} rows")
    out = np.empty((nrows, ncols), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != ncols:
            raise ShapeMismatch(f"{what}: row {i} should hold {ncols} pairs")
        for j, p in enumerate(row):
            out[i, j] = _unpair(p)
    return out


def encode_value(kind: str, value, d: int, n: int):
    if kind == "scalar":
        return _pair(value)
    if kind == "algebra":
        a = np.asarray(value, dtype=complex)
        if a.shape != (d, d):
            raise ShapeMismatch(f"algebra element must be ({d}, {d}), got {a.shape}")
        return [[_pair(z) for z in row] for row in a]
    if kind == "module":
        f = np.asarray(value, dtype=complex)
        if f.shape != (d, n):
            raise ShapeMismatch(f"module element must be ({d}, {n}), got {f.shape}")
        return [[_pair(z) for z in col] for col in f.T]
    if kind == "operator":
        m = np.asarray(getattr(value, "matrix", value), dtype=complex)
        if m.shape != (n, n):
            raise ShapeMismatch(f"operator must be ({n}, {n}), got {m.shape}")
        return [[_pair(z) for z in row] for row in m]
    if kind.endswith("_list"):
        base = kind[: -len("_list")]
        return [encode_value(base, v, d, n) for v in value]
    if kind == "real":
        return canonical_float(value)
    if kind == "int":
        return int(value)
    if kind == "text":
        return str(value)
    raise MalformedDocument(f"unknown kind {kind!r}")


def decode_value(kind: str, raw, d: int, n: int):
    if kind == "scalar":
        return _unpair(raw)
    if kind == "algebra":
        return _grid(raw, d, d, "algebra element")
    if kind == "module":
        return _grid(raw, n, d, "module element").T.copy()
    if kind == "operator":
        return _grid(raw, n, n, "operator")
    if kind.endswith("_list"):
        if not isinstance(raw, list):
            raise MalformedDocument(f"{kind} must be a list")
        base = kind[: -len("_list")]
        return [decode_value(base, v, d, n) for v in raw]
    try:
        if kind == "real":
            return canonical_float(raw)
        if kind == "int":
            if isinstance(raw, bool) or int(raw) != raw:
                raise ValueError
            return int(raw)
    except (TypeError, ValueError) as exc:
        raise MalformedDocument(f"bad {kind} value {raw!r}") from exc
    if kind == "text":
        return str(raw)
    raise MalformedDocument(f"unknown kind {kind!r}")


@dataclass
class Document:
    d: int
    n: int
    payload: dict = field(default_factory=dict)  # name -> (kind, decoded value)
    version: str = VERSION

    def put(self, name: str, kind: str, value) -> "Document":
        # round through the encoder so stored values are already canonical
        self.payload[name] = (kind, decode_value(kind, encode_value(kind, value, self.d, self.n), self.d, self.n))
        return self

    def get(self, name: str, kind: str | None = None, default=None):
        if name not in self.payload:
            if default is not None:
                return default
            raise MalformedDocument(f"document has no entry {name!r}")
        k, v = self.payload[name]
        if kind is not None and k != kind:
            raise MalformedDocument(f"entry {name!r} has kind {k!r}, expected {kind!r}")
        return v

    def __contains__(self, name):
        return name in self.payload

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "d": self.d,
            "n": self.n,
            "payload": {
                name: {"kind": kind, "value": encode_value(kind, value, self.d, self.n)}
                for name, (kind, value) in self.payload.items()
            },
        }

    @classmethod
    def from_json(cls, obj) -> "Document":
        if not isinstance(obj, dict):
            raise MalformedDocument("document must be a JSON object")
        if obj.get("version") != VERSION:
            raise MalformedDocument(f"unsupported version {obj.get('version')!r}")
        d, n = obj.get("d"), obj.get("n")
        if not all(isinstance(x, int) and not isinstance(x, bool) and x > 0 for x in (d, n)):
            raise MalformedDocument("d and n must be positive integers")
        payload = obj.get("payload", {})
        if not isinstance(payload, dict):
            raise MalformedDocument("payload must be an object")
        doc = cls(d, n)
        for name, entry in payload.items():
            if not isinstance(entry, dict) or "kind" not in entry or "value" not in entry:
                raise MalformedDocument(f"entry {name!r} needs 'kind' and 'value'")
            if entry["kind"] not in KINDS:
                raise MalformedDocument(f"entry {name!r} has unknown kind {entry['kind']!r}")
            doc.payload[name] = (entry["kind"], decode_value(entry["kind"], entry["value"], d, n))
        return doc


def dumps(doc: Document) -> str:
    return json.dumps(doc.to_json(), indent=1)


def loads(text: str) -> Document:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc
    return Document.from_json(obj)


def read(path) -> Document:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedDocument(f"cannot read {path}: {exc}") from exc
    return loads(text)


def write(doc: Document, path) -> None:
    Path(path).write_text(dumps(doc) + "\n")
