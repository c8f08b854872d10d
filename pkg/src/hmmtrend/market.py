"""From daily close prices to a counted six-state HMM.

ingest -> k-day difference -> I/D symbols + S1..S6 trend states -> counts.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .model import DEFAULT_STATES, DEFAULT_SYMBOLS, HmmModel

_log = logging.getLogger(__name__)

INCREASE, DECREASE = 0, 1  # indices into DEFAULT_SYMBOLS
ZERO_POLICIES = ("map-zero-to-D", "map-zero-to-I", "reject")
BINNING_MODES = ("equal_width", "quantile", "explicit")
N_BINS = 6


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Daily closes in ascending date order.

    ``dates`` is None for a headerless close-only file; day numbers
    (1-based row index) stand in for dates there.
    """

    closes: np.ndarray
    dates: tuple[dt.date, ...] | None = None

    def __len__(self):
        return len(self.closes)

    def labels(self) -> list[str]:
        if self.dates is None:
            return [str(i + 1) for i in range(len(self.closes))]
        return [d.isoformat() for d in self.dates]


@dataclass(frozen=True, eq=False)
class DiffSeries:
    k: int
    values: np.ndarray
    labels: tuple[str, ...]  # date (or day number) of the later close

    def __len__(self):
        return len(self.values)


def _read_text(data) -> str:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise InputError(f"input is not UTF-8: {exc}") from None
    return data


def _parse_close(text: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"line {lineno}: cannot parse close value {text!r}") from None
    if not np.isfinite(value) or value <= 0:
        raise InputError(f"line {lineno}: close value must be positive and finite, got {text!r}")
    return value


def ingest_csv(data: bytes | str, headerless: bool = False) -> PriceSeries:
    """Parse a ``date,close`` CSV (or a bare column of closes).

    Rows are sorted by date; duplicate dates are rejected.
    """
    text = _read_text(data)
    rows = [(i, r) for i, r in enumerate(csv.reader(io.StringIO(text)), start=1) if any(c.strip() for c in r)]
    if headerless:
        closes = []
        for lineno, row in rows:
            if len(row) != 1:
                raise InputError(f"line {lineno}: expected a single close value, got {len(row)} fields")
            closes.append(_parse_close(row[0].strip(), lineno))
        if not closes:
            raise InputError("no data rows")
        return PriceSeries(np.array(closes))

    if not rows:
        raise InputError("no data rows")
    header_line, header = rows[0]
    names = [h.strip().lower() for h in header]
    if "date" not in names or "close" not in names:
        raise InputError(f"line {header_line}: header must contain 'date' and 'close'")
    di, ci = names.index("date"), names.index("close")
    parsed = []
    for lineno, row in rows[1:]:
        if len(row) != len(names):
            raise InputError(f"line {lineno}: expected {len(names)} fields, got {len(row)}")
        try:
            day = dt.date.fromisoformat(row[di].strip())
        except ValueError:
            raise InputError(f"line {lineno}: bad date {row[di]!r} (want YYYY-MM-DD)") from None
        parsed.append((day, _parse_close(row[ci].strip(), lineno), lineno))
    if not parsed:
        raise InputError("no data rows")
    parsed.sort(key=lambda r: r[0])
    for (d0, _, l0), (d1, _, l1) in zip(parsed, parsed[1:]):
        if d0 == d1:
            raise InputError(f"duplicate date {d1.isoformat()} (lines {l0} and {l1})")
    return PriceSeries(np.array([p[1] for p in parsed]), tuple(p[0] for p in parsed))


def difference(series: PriceSeries, k: int) -> DiffSeries:
    """``close[t] - close[t-k]`` for every t with a k-day predecessor."""
    if k < 1:
        raise InputError(f"lag k must be >= 1, got {k}")
    if k >= len(series):
        raise InputError(f"lag k={k} needs more than {k} closes, series has {len(series)}")
    closes = series.closes
    return DiffSeries(k, closes[k:] - closes[:-k], tuple(series.labels()[k:]))


def symbolize(diffs, zero_policy: str = "map-zero-to-D") -> tuple[np.ndarray, int]:
    """Map diffs to symbol indices (0 = I, 1 = D).

    Returns ``(symbols, zero_count)``; zeros follow ``zero_policy``.
    """
    if zero_policy not in ZERO_POLICIES:
        raise InputError(f"unknown zero policy {zero_policy!r}")
    values = np.asarray(getattr(diffs, "values", diffs), dtype=float)
    zeros = values == 0
    n_zero = int(zeros.sum())
    if n_zero and zero_policy == "reject":
        raise InputError(f"{n_zero} zero difference(s) with zero_policy='reject'")
    symbols = np.where(values > 0, INCREASE, DECREASE).astype(np.int64)
    if zero_policy == "map-zero-to-I":
        symbols[zeros] = INCREASE
    if n_zero:
        _log.warning("%d zero difference(s) mapped by %s", n_zero, zero_policy)
    return symbols, n_zero


@dataclass(frozen=True)
class BinningSpec:
    mode: str = "equal_width"
    thresholds: tuple[float, ...] | None = None
    zero_policy: str = "map-zero-to-D"

    def __post_init__(self):
        if self.mode not in BINNING_MODES:
            raise InputError(f"unknown binning mode {self.mode!r}")
        if self.zero_policy not in ZERO_POLICIES:
            raise InputError(f"unknown zero policy {self.zero_policy!r}")
        if self.mode == "explicit":
            if self.thresholds is None or len(self.thresholds) != N_BINS - 1:
                raise InputError(f"explicit binning needs exactly {N_BINS - 1} thresholds")
            t = np.asarray(self.thresholds, dtype=float)
            if np.any(np.diff(t) <= 0):
                raise InputError(f"thresholds must be strictly ascending: {list(self.thresholds)}")
            object.__setattr__(self, "thresholds", tuple(float(x) for x in t))

    def cut_points(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if self.mode == "explicit":
            return np.array(self.thresholds)
        if values.size == 0:
            raise InputError("cannot bin an empty series")
        lo, hi = values.min(), values.max()
        if lo == hi:
            raise InputError(f"{self.mode} binning needs non-constant diffs")
        if self.mode == "equal_width":
            width = (hi - lo) / N_BINS
            return lo + width * np.arange(1, N_BINS)
        return np.quantile(values, np.arange(1, N_BINS) / N_BINS)


def assign_states(diffs, spec: BinningSpec = BinningSpec()) -> np.ndarray:
    """Bin each diff into S1..S6 (indices 0..5), most negative first.

    Intervals are closed on the left; a value on a cut point goes to the
    higher bin and the top bin is closed above.
    """
    values = np.asarray(getattr(diffs, "values", diffs), dtype=float)
    cuts = spec.cut_points(values)
    return np.searchsorted(cuts, values, side="right").astype(np.int64)


@dataclass(frozen=True, eq=False)
class LabeledSeries:
    diffs: DiffSeries
    symbols: np.ndarray
    states: np.ndarray
    binning: BinningSpec
    zero_count: int = 0

    def to_csv(self, symbols=DEFAULT_SYMBOLS, states=DEFAULT_STATES) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["date", "diff", "symbol", "state"])
        for label, d, m, s in zip(self.diffs.labels, self.diffs.values, self.symbols, self.states):
            writer.writerow([label, repr(float(d)), symbols[m], states[s]])
        return out.getvalue()


def label_series(series: PriceSeries, k: int, spec: BinningSpec = BinningSpec()) -> LabeledSeries:
    diffs = difference(series, k)
    symbols, n_zero = symbolize(diffs, spec.zero_policy)
    return LabeledSeries(diffs, symbols, assign_states(diffs, spec), spec, n_zero)


def read_labeled_csv(data, symbols=DEFAULT_SYMBOLS, states=DEFAULT_STATES) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Parse a ``date,diff,symbol,state`` file; returns (diffs, symbols, states)."""
    text = _read_text(data)
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise InputError("no data rows") from None
    want = ["date", "diff", "symbol", "state"]
    if header != want:
        raise InputError(f"line 1: expected header {','.join(want)}")
    d, m, s = [], [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise InputError(f"line {lineno}: expected 4 fields")
        try:
            d.append(float(row[1]))
        except ValueError:
            raise InputError(f"line {lineno}: bad diff {row[1]!r}") from None
        if row[2] not in symbols:
            raise InputError(f"line {lineno}: unknown symbol {row[2]!r}")
        if row[3] not in states:
            raise InputError(f"line {lineno}: unknown state {row[3]!r}")
        m.append(symbols.index(row[2]))
        s.append(states.index(row[3]))
    if not d:
        raise InputError("no data rows")
    return np.array(d), np.array(m, dtype=np.int64), np.array(s, dtype=np.int64)


# -- counting ----------------------------------------------------------------

PAIRINGS = ("same", "next")


@dataclass(frozen=True, eq=False)
class CountedEstimate:
    """Raw counts behind an estimated model.

    ``joint_counts[i, j, m]`` counts transitions i -> j whose source state
    emitted symbol m (under the chosen pairing).
    """

    transition_counts: np.ndarray
    emission_counts: np.ndarray
    initial_counts: np.ndarray
    joint_counts: np.ndarray
    smoothing: float = 0.0
    pairing: str = "same"
    warnings: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "transition_counts": self.transition_counts.tolist(),
            "emission_counts": self.emission_counts.tolist(),
            "initial_counts": self.initial_counts.tolist(),
            "joint_counts": self.joint_counts.tolist(),
            "smoothing": self.smoothing,
            "pairing": self.pairing,
            "warnings": list(self.warnings),
        }


def _rows_from_counts(counts, alpha, what, names, warnings):
    counts = np.asarray(counts, dtype=float)
    width = counts.shape[1]
    totals = counts.sum(axis=1)
    probs = np.empty_like(counts)
    for i in range(counts.shape[0]):
        if totals[i] + alpha * width == 0:
            msg = f"unvisited state {names[i]!r}: {what} row set to uniform"
            warnings.append(msg)
            _log.warning(msg)
            probs[i] = 1.0 / width
        else:
            probs[i] = (counts[i] + alpha) / (totals[i] + alpha * width)
    return probs


def estimate(
    states,
    symbols,
    alpha: float = 0.0,
    state_names=DEFAULT_STATES,
    symbol_names=DEFAULT_SYMBOLS,
    pairing: str = "same",
) -> tuple[CountedEstimate, HmmModel]:
    """Count transitions/emissions and normalize them into a model.

    ``pairing="same"`` counts (state_t, symbol_t); ``"next"`` counts
    (state_t, symbol_{t+1}) for t < T. Rows with no observations and no
    smoothing become uniform and are reported in ``warnings``. The initial
    distribution is the normalized state-occupancy frequency.
    """
    s = np.asarray(states, dtype=np.int64)
    o = np.asarray(symbols, dtype=np.int64)
    if s.ndim != 1 or o.ndim != 1 or s.size != o.size:
        raise InputError("state and symbol sequences must be 1-d and of equal length")
    if s.size < 2:
        raise InputError("need at least two labelled steps to estimate a model")
    if alpha < 0:
        raise InputError("smoothing must be non-negative")
    if pairing not in PAIRINGS:
        raise InputError(f"unknown pairing {pairing!r}")
    N, M = len(state_names), len(symbol_names)
    if s.min() < 0 or s.max() >= N:
        raise InputError("state index out of range")
    if o.min() < 0 or o.max() >= M:
        raise InputError("symbol index out of range")

    trans = np.zeros((N, N), dtype=np.int64)
    np.add.at(trans, (s[:-1], s[1:]), 1)
    if pairing == "same":
        emit_state, emit_symbol, carried = s, o, o[:-1]
    else:
        emit_state, emit_symbol, carried = s[:-1], o[1:], o[1:]
    emis = np.zeros((N, M), dtype=np.int64)
    np.add.at(emis, (emit_state, emit_symbol), 1)
    joint = np.zeros((N, N, M), dtype=np.int64)
    np.add.at(joint, (s[:-1], s[1:], carried), 1)
    occupancy = np.bincount(s, minlength=N)

    warnings: list[str] = []
    A = _rows_from_counts(trans, alpha, "transition", state_names, warnings)
    B = _rows_from_counts(emis, alpha, "emission", state_names, warnings)
    initial = occupancy / occupancy.sum()
    counts = CountedEstimate(trans, emis, occupancy, joint, float(alpha), pairing, tuple(warnings))
    model = HmmModel(state_names, symbol_names, A, B, initial)
    return counts, model


def joint_transition_table(model: HmmModel, counts: CountedEstimate) -> np.ndarray:
    """Transition probabilities split by the symbol carried on each move.

    Returns an ``(N, N, M)`` array; ``table[i, j, m]`` is the probability of
    going from i to j while i emits m, and ``table[i].sum() == A[i].sum()``.
    Flattening the last two axes gives the ``N x (N*M)`` published layout.
    Moves never observed (present only through smoothing) are split by the
    source state's emission row.
    """
    N, M = model.n_states, model.n_symbols
    joint = np.asarray(counts.joint_counts, dtype=float)
    if joint.shape != (N, N, M):
        raise InputError(f"joint counts have shape {joint.shape}, model needs {(N, N, M)}")
    pair_totals = joint.sum(axis=2, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        split = np.where(pair_totals > 0, joint / pair_totals, model.emission[:, None, :])
    return model.transition[:, :, None] * split
