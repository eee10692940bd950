"""JSON interchange for matrices: complex entries as ``[re, im]`` pairs, row-major."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

KINDS = ("operator", "superoperator", "gamma")


class ParseError(ValueError):
    """A matrix or schedule document is malformed."""


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(entries) -> np.ndarray:
    try:
        a = np.array(entries, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"entries are not a nested array of [re, im] pairs: {exc}") from None
    if a.ndim != 3 or a.shape[2] != 2:
        raise ParseError(f"entries must have shape (rows, cols, 2), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ParseError("entries contain non-finite values")
    return a[..., 0] + 1j * a[..., 1]


def matrix_document(m, kind: str = "operator") -> dict:
    if kind not in KINDS:
        raise ValueError(f"unknown matrix kind {kind!r}")
    m = np.asarray(m)
    dim = m.shape[0]
    if kind == "superoperator":
        dim = math.isqrt(m.shape[0])
    return {"kind": kind, "dim": int(dim), "entries": encode_matrix(m)}


def parse_matrix_document(doc, expected_kind: str | None = None) -> tuple[np.ndarray, str]:
    """Validate a matrix document and return ``(matrix, kind)``."""
    if not isinstance(doc, dict):
        raise ParseError("matrix document must be a JSON object")
    if "entries" not in doc:
        raise ParseError("matrix document lacks 'entries'")
    kind = doc.get("kind", "operator")
    if kind not in KINDS:
        raise ParseError(f"unknown matrix kind {kind!r}")
    if expected_kind is not None and kind != expected_kind:
        raise ParseError(f"expected a {expected_kind} document, got {kind}")
    m = decode_matrix(doc["entries"])
    dim = doc.get("dim")
    if dim is None:
        dim = math.isqrt(m.shape[0]) if kind == "superoperator" else m.shape[0]
    if not isinstance(dim, int) or dim < 1:
        raise ParseError(f"'dim' must be a positive integer, got {dim!r}")
    side = dim * dim if kind == "superoperator" else dim
    if m.shape != (side, side):
        raise ParseError(f"{kind} with dim {dim} must be {side}x{side}, got {m.shape[0]}x{m.shape[1]}")
    return m, kind


def load_json(path) -> object:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from None


def read_matrix(path, expected_kind: str | None = None) -> np.ndarray:
    return parse_matrix_document(load_json(path), expected_kind)[0]


def write_matrix(path, m, kind: str = "operator") -> None:
    Path(path).write_text(json.dumps(matrix_document(m, kind)) + "\n", encoding="utf-8")


def _plain(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, default=_plain) + "\n"
