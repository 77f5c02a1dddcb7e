"""JSON file formats for states, observables, density matrices and vectors.

Complex numbers are always two-element ``[re, im]`` lists, so a ``d1 x d2``
matrix is a nested list of shape ``(d1, d2, 2)``.

State file::

    {"dims": [dA, dB], "coeff": [[[re, im], ...], ...], "label": "optional"}

Observable file::

    {"side": "A" | "B", "matrix": [[[re, im], ...], ...]}

Density file (input to purification)::

    {"matrix": [[[re, im], ...], ...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bipartite import BipartiteState, make_state
from .errors import EntangleError, ParseError
from .numeric import DEFAULT_TOL, TolerancePolicy, check_hermitian


def encode_complex(a, digits: int | None = None):
    """Nested ``[re, im]`` lists; rounded to ``digits`` decimals when given."""
    a = np.asarray(a, dtype=complex)
    pairs = np.stack([a.real, a.imag], axis=-1)
    if digits is not None:
        pairs = np.round(pairs, digits) + 0.0  # drop negative zeros
    return pairs.tolist()


def decode_complex(obj, ndim: int, name: str = "value") -> np.ndarray:
    try:
        raw = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: expected numbers in [re, im] pairs ({exc})") from None
    if raw.ndim != ndim + 1 or raw.shape[-1] != 2 or 0 in raw.shape:
        raise ParseError(f"{name}: expected a {ndim}-d array of [re, im] pairs, got shape {raw.shape}")
    if not np.all(np.isfinite(raw)):
        raise ParseError(f"{name}: contains non-finite entries")
    return raw[..., 0] + 1j * raw[..., 1]


def read_json(path) -> tuple[dict, bytes]:
    """Parse a JSON object from ``path``; also return the raw bytes for digesting."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    return data, raw


def _field(data: dict, key: str, where) -> object:
    if key not in data:
        raise ParseError(f"{where}: missing field {key!r}")
    return data[key]


@dataclass(frozen=True, eq=False)
class StateFile:
    state: BipartiteState
    label: str | None = None


def parse_state(data: dict, where="state", tol: TolerancePolicy = DEFAULT_TOL) -> StateFile:
    dims = _field(data, "dims", where)
    if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in dims)):
        raise ParseError(f"{where}: dims must be two positive integers, got {dims!r}")
    coeff = decode_complex(_field(data, "coeff", where), 2, f"{where}.coeff")
    if coeff.shape != tuple(dims):
        raise ParseError(f"{where}: coeff has shape {coeff.shape}, dims say {tuple(dims)}")
    label = data.get("label")
    if label is not None and not isinstance(label, str):
        raise ParseError(f"{where}: label must be a string")
    # make_state rescales and sets normalization_applied; callers decide how to warn
    return StateFile(make_state(coeff, tol), label)


def state_to_dict(state: BipartiteState, label: str | None = None) -> dict:
    out = {"dims": list(state.dims), "coeff": encode_complex(state.coeff)}
    if label is not None:
        out["label"] = label
    return out


def parse_observable(data: dict, where="observable", tol: TolerancePolicy = DEFAULT_TOL) -> tuple[str, np.ndarray]:
    side = _field(data, "side", where)
    if side not in ("A", "B"):
        raise ParseError(f"{where}: side must be 'A' or 'B', got {side!r}")
    matrix = _square(data, where)
    try:
        matrix = check_hermitian(matrix, tol, f"{where}.matrix")
    except EntangleError as exc:
        raise ParseError(str(exc)) from None
    return side, matrix


def parse_density(data: dict, where="density") -> np.ndarray:
    return _square(data, where)


def _square(data, where) -> np.ndarray:
    m = decode_complex(_field(data, "matrix", where), 2, f"{where}.matrix")
    if m.shape[0] != m.shape[1]:
        raise ParseError(f"{where}: matrix must be square, got {m.shape}")
    return m


def parse_vector(text: str) -> tuple[np.ndarray, bytes]:
    """A vector given inline as JSON ``[[re, im], ...]`` or as a path to such a file.

    A file may also hold an object with a ``"vector"`` field.
    """
    stripped = text.strip()
    if stripped.startswith("["):
        raw = stripped.encode()
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"vector: invalid JSON ({exc})") from None
    else:
        try:
            raw = Path(text).read_bytes()
            data = json.loads(raw)
        except OSError as exc:
            raise ParseError(f"cannot read {text}: {exc.strerror}") from None
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ParseError(f"{text}: invalid JSON ({exc})") from None
        if isinstance(data, dict):
            data = _field(data, "vector", text)
    return decode_complex(data, 1, "vector"), raw


def write_json(path, data: dict):
    Path(path).write_text(json.dumps(data, indent=2) + "\n")
