"""Seeded sampling of state/symbol paths.

Two start conventions are supported:

* ``include_start=False`` (default): the chain sits in state 0 before step
  1, transitions first and then emits, so ``states[t]`` emits
  ``symbols[t]``. This is the semantics of MATLAB's ``hmmgenerate``.
* ``include_start=True``: position 0 is state 0 paired with the start
  marker ``"ε"``; every later symbol is the one emitted by the previous state
  on the transition into the current one (the layout of the joint
  transition-emission tables).
"""

from __future__ import annotations

import json
import math
import secrets
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InputError
from .model import DEFAULT_TOLERANCE, HmmModel

START_MARKER = "ε"
ALGORITHM = "numpy-pcg64"


@dataclass(frozen=True)
class RngSpec:
    """Seed plus optional stream id; distinct streams are independent."""

    seed: int
    stream: int = 0
    algorithm: str = ALGORITHM

    def __post_init__(self):
        if self.algorithm != ALGORITHM:
            raise InputError(f"unsupported RNG algorithm {self.algorithm!r}")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be an unsigned 64-bit integer")

    @classmethod
    def fresh(cls) -> "RngSpec":
        return cls(secrets.randbits(63))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream,) if self.stream else ())
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True, eq=False)
class GeneratedPath:
    states: np.ndarray
    symbols: np.ndarray  # -1 marks the start symbol at position 0
    seed: int | None = None
    include_start: bool = False
    algorithm: str = ALGORITHM
    stream: int = 0

    def __len__(self):
        return len(self.states)

    def __eq__(self, other):
        if not isinstance(other, GeneratedPath):
            return NotImplemented
        return (
            np.array_equal(self.states, other.states)
            and np.array_equal(self.symbols, other.symbols)
            and (self.seed, self.include_start, self.algorithm, self.stream)
            == (other.seed, other.include_start, other.algorithm, other.stream)
        )

    __hash__ = None

    def to_dict(self, model: HmmModel) -> dict:
        doc = {
            "seed": self.seed,
            "algorithm": self.algorithm,
            "include_start": self.include_start,
            "states": [model.states[s] for s in self.states],
            "symbols": [START_MARKER if m < 0 else model.symbols[m] for m in self.symbols],
        }
        if self.stream:
            doc["stream"] = self.stream
        return doc

    def to_json(self, model: HmmModel) -> str:
        return json.dumps(self.to_dict(model), ensure_ascii=False)

    @classmethod
    def from_dict(cls, doc: dict, model: HmmModel) -> "GeneratedPath":
        try:
            states = [model.state_index(s) for s in doc["states"]]
            raw = doc["symbols"]
        except (KeyError, TypeError):
            raise InputError("path document needs 'states' and 'symbols'") from None
        include_start = bool(doc.get("include_start", bool(raw) and raw[0] == START_MARKER))
        symbols = []
        for pos, label in enumerate(raw):
            if label == START_MARKER:
                if pos != 0 or not include_start:
                    raise InputError(f"start marker allowed only at position 0 (found at {pos})")
                symbols.append(-1)
            else:
                symbols.append(model.symbol_index(label))
        return cls(
            np.array(states, dtype=np.int64),
            np.array(symbols, dtype=np.int64),
            seed=doc.get("seed"),
            include_start=include_start,
            stream=int(doc.get("stream", 0)),
        )


def _cdf_tables(matrix: np.ndarray):
    cdf = np.ascontiguousarray(np.cumsum(matrix, axis=1))
    # index of the last positive entry per row; absorbs u >= cdf[-1] round-off
    width = matrix.shape[1]
    last = (width - 1 - np.argmax((matrix > 0)[:, ::-1], axis=1)).astype(np.int64)
    return cdf, last


class Sampler:
    """Validated model with precomputed inverse-CDF tables, reusable across draws."""

    def __init__(self, model: HmmModel):
        self.model = model.checked(DEFAULT_TOLERANCE)
        self._cdf_A, self._last_A = _cdf_tables(model.transition)
        self._cdf_B, self._last_B = _cdf_tables(model.emission)

    def sample(self, length: int, rng: RngSpec, include_start: bool = False) -> GeneratedPath:
        if isinstance(length, bool) or not isinstance(length, (int, np.integer)) or length < 1:
            raise InputError(f"length must be a positive integer, got {length!r}")
        uniforms = rng.generator().random((int(length), 2))
        states, symbols = kernels.sample_path(
            self._cdf_A, self._cdf_B, self._last_A, self._last_B, 0, uniforms, bool(include_start)
        )
        return GeneratedPath(
            states, symbols, seed=rng.seed, include_start=bool(include_start),
            algorithm=rng.algorithm, stream=rng.stream,
        )


def as_rng(rng: RngSpec | int | None) -> RngSpec:
    if rng is None:
        return RngSpec.fresh()
    if isinstance(rng, RngSpec):
        return rng
    return RngSpec(int(rng))


def generate(
    model: HmmModel,
    length: int,
    rng: RngSpec | int | None = None,
    include_start: bool = False,
) -> GeneratedPath:
    """Sample a path of ``length`` states (and as many symbol slots).

    ``rng`` may be an :class:`RngSpec`, a plain integer seed, or ``None`` for
    a fresh seed; the seed actually used is recorded on the result.
    """
    if isinstance(length, bool) or not isinstance(length, (int, np.integer)) or length < 1:
        raise InputError(f"length must be a positive integer, got {length!r}")
    return Sampler(model).sample(length, as_rng(rng), include_start)


def _checked_arrays(model: HmmModel, path: GeneratedPath):
    s, o = np.asarray(path.states), np.asarray(path.symbols)
    if s.shape != o.shape or s.size == 0:
        raise InputError("path states and symbols must be non-empty and of equal length")
    if np.any((s < 0) | (s >= model.n_states)):
        raise InputError("path state index outside the model's state space")
    real = o[1:] if path.include_start else o
    if np.any((real < 0) | (real >= model.n_symbols)):
        raise InputError("path symbol index outside the model's alphabet")
    return s, o


def path_factors(model: HmmModel, path: GeneratedPath) -> list[tuple[str, float]]:
    """Every probability factor of the path, labelled, in sampling order.

    Useful for auditing why a path is impossible under a model.
    """
    s, o = _checked_arrays(model, path)
    A, B = model.transition, model.emission
    name, sym = model.states, model.symbols
    factors = []
    if path.include_start:
        factors.append((f"start={name[s[0]]}", 1.0 if s[0] == 0 else 0.0))
        for p in range(1, s.size):
            factors.append((f"b({name[s[p - 1]]},{sym[o[p]]})", float(B[s[p - 1], o[p]])))
            factors.append((f"a({name[s[p - 1]]},{name[s[p]]})", float(A[s[p - 1], s[p]])))
    else:
        prev = 0
        for t in range(s.size):
            factors.append((f"a({name[prev]},{name[s[t]]})", float(A[prev, s[t]])))
            factors.append((f"b({name[s[t]]},{sym[o[t]]})", float(B[s[t], o[t]])))
            prev = s[t]
    return factors


def path_log_probability(model: HmmModel, path: GeneratedPath) -> float:
    """Log-probability of sampling exactly ``path``; ``-inf`` if impossible."""
    s, o = _checked_arrays(model, path)
    A, B = model.transition, model.emission
    if path.include_start:
        if s[0] != 0:
            return -math.inf
        probs = np.concatenate([B[s[:-1], o[1:]], A[s[:-1], s[1:]]])
    else:
        prev = np.concatenate([[0], s[:-1]])
        probs = np.concatenate([A[prev, s], B[s, o]])
    if np.any(probs <= 0.0):
        return -math.inf
    return float(np.log(probs).sum())
