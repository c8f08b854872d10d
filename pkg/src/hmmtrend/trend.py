"""Candidate state-sequence ranking and steady-state trend reports."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError
from .generator import GeneratedPath, RngSpec, Sampler, path_log_probability
from .model import HmmModel
from .stationary import stationary_distribution

FITNESS_NOTE = (
    "Higher fitness is better: it marks the candidate least similar to the "
    "other candidates. Fitness is not a likelihood."
)


def compare_sequences(a, b) -> float:
    """Fraction of positions at which two equal-length sequences agree."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise InputError(f"sequences must have equal length ({a.size} vs {b.size})")
    if a.size == 0:
        raise InputError("sequences must be non-empty")
    return float(np.count_nonzero(a == b)) / a.size


@dataclass(frozen=True)
class FitnessRow:
    label: str
    compare_sum: float
    fitness: float  # math.inf when compare_sum == 0
    reference_sum: float | None = None
    diverges: bool = False


@dataclass(frozen=True)
class FitnessResult:
    rows: tuple[FitnessRow, ...]
    ranking: tuple[str, ...]
    compare_matrix: np.ndarray

    def row(self, label) -> FitnessRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)

    def to_dict(self) -> dict:
        rows = []
        for r in self.rows:
            entry = {
                "label": r.label,
                "compare_sum": r.compare_sum,
                "fitness": "inf" if math.isinf(r.fitness) else r.fitness,
            }
            if r.reference_sum is not None:
                entry["reference_sum"] = r.reference_sum
                entry["diverges"] = r.diverges
            rows.append(entry)
        return {"rows": rows, "ranking": list(self.ranking), "note": FITNESS_NOTE}

    def to_text(self) -> str:
        width = max(len("label"), *(len(r.label) for r in self.rows))
        lines = [f"{'label':<{width}}  {'compare':>8}  {'fitness':>8}"]
        for r in self.rows:
            fit = "inf" if math.isinf(r.fitness) else f"{r.fitness:.2f}"
            line = f"{r.label:<{width}}  {r.compare_sum:>8.2f}  {fit:>8}"
            if r.diverges:
                line += f"  (reference prints {r.reference_sum:.2f})"
            lines.append(line)
        lines.append("ranking: " + " > ".join(self.ranking))
        lines.append(FITNESS_NOTE)
        return "\n".join(lines) + "\n"


def fitness_table(
    sequences: Sequence,
    labels: Sequence[str] | None = None,
    reference_sums: Mapping[str, float] | None = None,
    reference_tol: float = 0.01,
) -> FitnessResult:
    """Score each candidate by ``1 / sum_{j != i} compare(i, j)``.

    ``reference_sums`` maps labels to externally reported compare sums; rows
    that differ by more than ``reference_tol`` are flagged ``diverges``.
    """
    seqs = [np.asarray(s) for s in sequences]
    if len(seqs) < 2:
        raise InputError("need at least two candidate sequences")
    if labels is None:
        labels = [str(i + 1) for i in range(len(seqs))]
    labels = [str(x) for x in labels]
    if len(labels) != len(seqs):
        raise InputError("one label per sequence required")
    n = len(seqs)
    C = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            C[i, j] = C[j, i] = compare_sequences(seqs[i], seqs[j])
    sums = C.sum(axis=1) - 1.0
    rows = []
    for label, total in zip(labels, sums):
        total = float(total)
        fit = math.inf if total == 0 else 1.0 / total
        ref = None if reference_sums is None else reference_sums.get(label)
        diverges = ref is not None and abs(total - ref) > reference_tol
        rows.append(FitnessRow(label, total, fit, ref, diverges))
    order = sorted(range(n), key=lambda i: (-rows[i].fitness, i))
    return FitnessResult(tuple(rows), tuple(labels[i] for i in order), C)


@dataclass(frozen=True)
class OptimumResult:
    path: GeneratedPath
    log_probability: float
    trace: list[float]  # best log-probability after each block of trials
    trials: int


def find_optimum_sequence(
    model: HmmModel,
    length: int,
    trials: int,
    rng: RngSpec | int,
    include_start: bool = False,
    block: int = 100,
) -> OptimumResult:
    """Best of ``trials`` seeded samples by path log-probability.

    Trial ``i`` draws from stream ``i`` of the seed, so results do not depend
    on evaluation order. Ties go to the earliest trial.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    if block < 1:
        raise InputError("block must be >= 1")
    sampler = Sampler(model)
    seed = rng.seed if isinstance(rng, RngSpec) else int(rng)
    best_path, best_lp = None, -math.inf
    trace = []
    for i in range(trials):
        path = sampler.sample(length, RngSpec(seed, stream=i), include_start)
        lp = path_log_probability(model, path)
        if best_path is None or lp > best_lp:
            best_path, best_lp = path, lp
        if (i + 1) % block == 0 or i + 1 == trials:
            trace.append(best_lp)
    return OptimumResult(best_path, best_lp, trace, trials)


@dataclass(frozen=True)
class TrendRow:
    state: str
    probability: float
    percentage: float


@dataclass(frozen=True)
class TrendReport:
    label: str
    rows: tuple[TrendRow, ...]

    @property
    def dominant(self) -> TrendRow:
        return max(self.rows, key=lambda r: r.probability)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([r.probability for r in self.rows])

    def ordering(self) -> list[str]:
        """State names from most to least probable (stable on ties)."""
        idx = sorted(range(len(self.rows)), key=lambda i: -self.rows[i].probability)
        return [self.rows[i].state for i in idx]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "steady_state": [
                {"state": r.state, "probability": r.probability, "percentage": r.percentage}
                for r in self.rows
            ],
            "dominant": self.dominant.state,
            "ordering": self.ordering(),
        }

    def to_text(self) -> str:
        width = max(len("state"), *(len(r.state) for r in self.rows))
        lines = [f"trend report: {self.label}" if self.label else "trend report"]
        lines.append(f"{'state':<{width}}  {'pi':>6}  {'percent':>8}")
        for r in self.rows:
            lines.append(f"{r.state:<{width}}  {r.probability:>6.2f}  {r.percentage:>7.2f}%")
        d = self.dominant
        lines.append(f"dominant trend: {d.state} ({d.percentage:.2f}%)")
        return "\n".join(lines) + "\n"


def trend_report(model: HmmModel, label: str = "", **stationary_options) -> TrendReport:
    """Label the chain's stationary distribution with state names."""
    pi = stationary_distribution(model.transition, state_names=model.states, **stationary_options)
    rows = tuple(
        TrendRow(name, float(p), float(100.0 * p)) for name, p in zip(model.states, pi)
    )
    return TrendReport(label, rows)
