"""Discrete HMM parameter container, validation and JSON (de)serialization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import InputError, ValidationError

DEFAULT_STATES = (
    "very low",
    "low",
    "moderate low",
    "moderate high",
    "high",
    "very high",
)
DEFAULT_SYMBOLS = ("I", "D")

#: Row-sum tolerance for matrices produced by computation.
DEFAULT_TOLERANCE = 1e-9
#: Row-sum tolerance recommended for matrices transcribed with 2-3 decimals.
TRANSCRIPTION_TOLERANCE = 0.01

# Rows already within this distance of 1 are left untouched by normalize_rows,
# which makes normalization idempotent and keeps save/load bit-exact.
_UNIT_SUM_SLACK = 1e-13
_ULP_SLACK = 8 * np.finfo(float).eps


def _frozen(values, ndim: int, name: str) -> np.ndarray:
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name}: not a numeric array ({exc})") from None
    if arr.ndim != ndim:
        raise InputError(f"{name}: expected {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class HmmModel:
    """Immutable discrete HMM ``(states, symbols, transition, emission, initial)``.

    Matrices are row-major with the row indexing the source state.
    Construction only coerces shapes; use :func:`validate_model` or
    :meth:`checked` to enforce the stochastic constraints.
    """

    states: tuple[str, ...]
    symbols: tuple[str, ...]
    transition: np.ndarray
    emission: np.ndarray
    initial: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        object.__setattr__(self, "symbols", tuple(str(s) for s in self.symbols))
        object.__setattr__(self, "transition", _frozen(self.transition, 2, "transition"))
        object.__setattr__(self, "emission", _frozen(self.emission, 2, "emission"))
        object.__setattr__(self, "initial", _frozen(self.initial, 1, "initial"))

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_symbols(self) -> int:
        return len(self.symbols)

    def __eq__(self, other):
        if not isinstance(other, HmmModel):
            return NotImplemented
        return (
            self.states == other.states
            and self.symbols == other.symbols
            and np.array_equal(self.transition, other.transition)
            and np.array_equal(self.emission, other.emission)
            and np.array_equal(self.initial, other.initial)
        )

    __hash__ = None

    def replace(self, **changes) -> "HmmModel":
        fields = dict(
            states=self.states,
            symbols=self.symbols,
            transition=self.transition,
            emission=self.emission,
            initial=self.initial,
            meta=dict(self.meta),
        )
        fields.update(changes)
        return HmmModel(**fields)

    def checked(self, tolerance: float = DEFAULT_TOLERANCE) -> "HmmModel":
        """Return ``self`` if valid at ``tolerance``, else raise ValidationError."""
        result = validate_model(self, tolerance)
        if not result.ok:
            raise ValidationError(
                "invalid model: " + "; ".join(v.message for v in result.violations),
                result.violations,
            )
        return self

    def normalized(self) -> "HmmModel":
        """Rescale every row (and the initial vector) to sum to one."""
        return self.replace(
            transition=normalize_rows(self.transition),
            emission=normalize_rows(self.emission),
            initial=normalize_rows(self.initial[None, :])[0],
        )

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise InputError(f"unknown state {name!r}") from None

    def symbol_index(self, label: str) -> int:
        try:
            return self.symbols.index(label)
        except ValueError:
            raise InputError(f"unknown symbol {label!r}") from None


@dataclass(frozen=True)
class Violation:
    where: str  # "transition", "emission", "initial", "states", "symbols", "shape"
    message: str
    row: int | None = None
    value: float | None = None


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def _check_labels(labels: Sequence[str], where: str) -> list[Violation]:
    out = []
    if len(labels) < 1:
        out.append(Violation(where, f"{where}: at least one label required"))
    if any(not lab for lab in labels):
        out.append(Violation(where, f"{where}: empty label"))
    if len(set(labels)) != len(labels):
        out.append(Violation(where, f"{where}: duplicate labels"))
    return out


def _check_rows(matrix: np.ndarray, where: str, tolerance: float) -> list[Violation]:
    finite = np.isfinite(matrix).all(axis=1)
    in_range = ((matrix >= 0) & (matrix <= 1)).all(axis=1)
    sums = matrix.sum(axis=1)
    # a few ulps of slack so a transcribed row like 0.33+0.33+0.33 passes at 0.01
    sum_ok = np.abs(sums - 1.0) <= tolerance + _ULP_SLACK
    if finite.all() and in_range.all() and sum_ok.all():
        return []
    out = []
    for i, row in enumerate(matrix):
        if not finite[i]:
            out.append(Violation(where, f"{where} row {i}: non-finite entry", row=i))
            continue
        if not in_range[i]:
            bad = float(row[(row < 0) | (row > 1)][0])
            out.append(
                Violation(where, f"{where} row {i}: entry {bad} outside [0, 1]", row=i, value=bad)
            )
        if not sum_ok[i]:
            total = float(sums[i])
            out.append(
                Violation(where, f"{where} row {i} sums to {total:.12g}", row=i, value=total)
            )
    return out


def validate_model(model: HmmModel, tolerance: float = DEFAULT_TOLERANCE) -> ValidationResult:
    """Check every structural and stochastic constraint of ``model``.

    Violations are returned as data; this function never raises on a bad
    model.
    """
    violations = _check_labels(model.states, "states") + _check_labels(model.symbols, "symbols")
    n, m = model.n_states, model.n_symbols
    if model.transition.shape != (n, n):
        violations.append(
            Violation("shape", f"transition has shape {model.transition.shape}, expected {(n, n)}")
        )
    if model.emission.shape != (n, m):
        violations.append(
            Violation("shape", f"emission has shape {model.emission.shape}, expected {(n, m)}")
        )
    if model.initial.shape != (n,):
        violations.append(
            Violation("shape", f"initial has shape {model.initial.shape}, expected {(n,)}")
        )
    violations += _check_rows(model.transition, "transition", tolerance)
    violations += _check_rows(model.emission, "emission", tolerance)
    violations += [
        Violation("initial", v.message.replace(" row 0", ""), value=v.value)
        for v in _check_rows(model.initial[None, :], "initial", tolerance)
    ]
    return ValidationResult(tuple(violations))


def normalize_rows(matrix) -> np.ndarray:
    """Divide each row by its sum.

    Raises
    ------
    ValidationError
        If an entry is negative or a row sums to zero.
    """
    arr = np.array(matrix, dtype=float)
    if arr.ndim != 2:
        raise InputError(f"expected a 2-d matrix, got shape {arr.shape}")
    if np.any(arr < 0):
        i = int(np.argwhere(arr < 0)[0, 0])
        raise ValidationError(f"row {i} has a negative entry", [Violation("matrix", "negative", row=i)])
    sums = arr.sum(axis=1)
    zero = np.flatnonzero(sums <= 0)
    if zero.size:
        i = int(zero[0])
        raise ValidationError(f"row {i} sums to zero", [Violation("matrix", "zero row", row=i, value=0.0)])
    rescale = np.abs(sums - 1.0) > _UNIT_SUM_SLACK
    arr[rescale] /= sums[rescale, None]
    return arr


# -- JSON -------------------------------------------------------------------


def model_to_dict(model: HmmModel) -> dict[str, Any]:
    doc = {
        "states": list(model.states),
        "symbols": list(model.symbols),
        "transition": model.transition.tolist(),
        "emission": model.emission.tolist(),
        "initial": model.initial.tolist(),
    }
    if model.meta:
        doc["meta"] = model.meta
    return doc


def save_model(model: HmmModel) -> bytes:
    # float repr is the shortest string that round-trips (<= 17 significant digits)
    return (json.dumps(model_to_dict(model), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def model_from_dict(doc: Any, tolerance: float = DEFAULT_TOLERANCE) -> HmmModel:
    if not isinstance(doc, dict):
        raise InputError("model document must be a JSON object")
    missing = [k for k in ("states", "symbols", "transition", "emission", "initial") if k not in doc]
    if missing:
        raise InputError(f"model document missing keys: {', '.join(missing)}")
    states, symbols = doc["states"], doc["symbols"]
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise InputError("'states' must be an array of strings")
    if not isinstance(symbols, list) or not all(isinstance(s, str) for s in symbols):
        raise InputError("'symbols' must be an array of strings")
    n, m = len(states), len(symbols)

    def matrix(key, rows, cols):
        value = doc[key]
        if (
            not isinstance(value, list)
            or len(value) != rows
            or any(not isinstance(r, list) or len(r) != cols for r in value)
        ):
            raise InputError(f"'{key}' must be {rows}x{cols}")
        return value

    transition = matrix("transition", n, n)
    emission = matrix("emission", n, m)
    initial = doc["initial"]
    if not isinstance(initial, list) or len(initial) != n:
        raise InputError(f"'initial' must have {n} entries")
    for key, value in (("transition", transition), ("emission", emission), ("initial", [initial])):
        for row in value:
            for x in row:
                if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                    raise InputError(f"'{key}' contains a non-numeric entry {x!r}")
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise InputError("'meta' must be an object")

    model = HmmModel(states, symbols, transition, emission, initial, meta=meta)
    model.checked(tolerance)
    return model.normalized()


def load_model(data: bytes | str, tolerance: float = DEFAULT_TOLERANCE) -> HmmModel:
    """Parse a model document, validate it at ``tolerance``, renormalize rows.

    Rows that already sum to one (to within float rounding) are kept
    bit-for-bit.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InputError(f"model document is not UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed model document: {exc}") from None
    return model_from_dict(doc, tolerance)


def uniform_initial(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)
