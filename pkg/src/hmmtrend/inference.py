"""Evaluation, decoding and learning for discrete HMMs.

Forward-backward uses per-step scaling; Viterbi works in log space.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InfeasibleSequenceError, InputError, ValidationError
from .model import DEFAULT_TOLERANCE, HmmModel

_log = logging.getLogger(__name__)


def as_observations(obs, n_symbols: int) -> np.ndarray:
    """Coerce ``obs`` to a contiguous int64 index array and range-check it."""
    arr = np.ascontiguousarray(obs, dtype=np.int64)
    if arr.ndim != 1:
        raise InputError(f"observation sequence must be 1-d, got shape {arr.shape}")
    if arr.size == 0:
        raise InputError("observation sequence is empty")
    bad = np.flatnonzero((arr < 0) | (arr >= n_symbols))
    if bad.size:
        t = int(bad[0])
        raise InputError(f"observation {t} has symbol index {arr[t]} outside [0, {n_symbols})")
    return arr


def _params(model: HmmModel):
    model.checked(DEFAULT_TOLERANCE)
    return (
        np.ascontiguousarray(model.initial, dtype=float),
        np.ascontiguousarray(model.transition, dtype=float),
        np.ascontiguousarray(model.emission, dtype=float),
    )


def _log0(x):
    with np.errstate(divide="ignore"):
        return np.log(x)


@dataclass(frozen=True)
class ForwardResult:
    alpha: np.ndarray  # (T, N), each row sums to one
    scale: np.ndarray  # (T,), per-step normalizers

    @property
    def log_likelihood(self) -> float:
        if np.any(self.scale <= 0):
            return -math.inf
        return float(np.log(self.scale).sum())


def forward(model: HmmModel, obs) -> ForwardResult:
    pi, A, B = _params(model)
    o = as_observations(obs, model.n_symbols)
    alpha, scale = kernels.forward_scaled(pi, A, B, o)
    return ForwardResult(alpha, scale)


def forward_likelihood(model: HmmModel, obs) -> float:
    """Natural-log probability that ``model`` generated ``obs``.

    Returns ``-inf`` when the sequence is impossible under the model.
    """
    return forward(model, obs).log_likelihood


def backward_pass(model: HmmModel, obs, scale=None) -> tuple[np.ndarray, np.ndarray]:
    """Scaled backward variables and the forward scaling factors.

    With the forward pass normalized so that ``alpha[t].sum() == 1``, the
    returned ``beta`` satisfies ``(alpha[t] * beta[t]).sum() == 1`` for every
    t. Unscaled values are recovered as ``beta[t] * prod(scale[t+1:])``.

    Raises
    ------
    InfeasibleSequenceError
        If the observation sequence has probability zero.
    """
    pi, A, B = _params(model)
    o = as_observations(obs, model.n_symbols)
    if scale is None:
        _, scale = kernels.forward_scaled(pi, A, B, o)
    if np.any(scale <= 0):
        raise InfeasibleSequenceError("observation sequence has probability zero")
    beta = kernels.backward_scaled(A, B, o, np.ascontiguousarray(scale, dtype=float))
    return beta, scale


def viterbi_decode(model: HmmModel, obs) -> tuple[np.ndarray, float]:
    """Most likely state path and its joint log-probability with ``obs``.

    Ties are broken toward the lowest state index.

    Raises
    ------
    InfeasibleSequenceError
        If no state path can produce ``obs``.
    """
    pi, A, B = _params(model)
    o = as_observations(obs, model.n_symbols)
    path, best = kernels.viterbi(_log0(pi), _log0(A), _log0(B), o)
    if best == -math.inf:
        raise InfeasibleSequenceError("no feasible state path for the observation sequence")
    return path, best


def path_joint_log_probability(model: HmmModel, states, obs) -> float:
    """log P(states, obs) under the model's initial distribution."""
    s = np.asarray(states, dtype=np.int64)
    o = as_observations(obs, model.n_symbols)
    if s.shape != o.shape:
        raise InputError("state and observation sequences differ in length")
    terms = [model.initial[s[0]]]
    terms += list(model.transition[s[:-1], s[1:]])
    terms += list(model.emission[s, o])
    return float(_log0(np.array(terms)).sum())


@dataclass(frozen=True)
class TrainingResult:
    model: HmmModel
    trace: list[float]  # log-likelihood of the model entering each iteration
    converged: bool

    @property
    def iterations(self) -> int:
        return len(self.trace)


def baum_welch_train(
    model: HmmModel,
    obs,
    max_iter: int = 100,
    loglik_delta_tol: float = 1e-8,
    floor: float = 0.0,
    callback=None,
) -> TrainingResult:
    """Re-estimate transition, emission and initial parameters by EM.

    ``trace[k]`` is the log-likelihood of the model after ``k`` updates.
    Iteration stops after ``max_iter`` updates or once an update improves the
    log-likelihood by less than ``loglik_delta_tol``. ``floor`` is added to
    every expected emission count before row renormalization; with
    ``floor=0`` zero-probability entries remain zero. ``callback(k, model)``
    is invoked with every intermediate model.
    """
    if max_iter < 0:
        raise InputError("max_iter must be non-negative")
    if floor < 0:
        raise InputError("floor must be non-negative")
    for name, mat in (("transition", model.transition), ("emission", model.emission)):
        zero_rows = np.flatnonzero(np.asarray(mat).sum(axis=1) <= 0)
        if zero_rows.size:
            raise ValidationError(f"degenerate initialization: {name} row {zero_rows[0]} is all zeros")
    pi, A, B = _params(model)
    o = as_observations(obs, model.n_symbols)
    if o.size < 2:
        raise InputError("training needs at least two observations")
    onehot = np.zeros((o.size, model.n_symbols))
    onehot[np.arange(o.size), o] = 1.0

    trace: list[float] = []
    converged = False
    current = model
    for k in range(max_iter + 1):
        alpha, scale = kernels.forward_scaled(pi, A, B, o)
        if np.any(scale <= 0):
            raise InfeasibleSequenceError("observation sequence has probability zero under the model")
        loglik = float(np.log(scale).sum())
        if trace and loglik - trace[-1] < -1e-9:
            _log.warning("log-likelihood decreased: %.12g -> %.12g", trace[-1], loglik)
        if trace and loglik - trace[-1] < loglik_delta_tol:
            trace.append(loglik)
            converged = True
            break
        trace.append(loglik)
        if k == max_iter:
            break

        beta = kernels.backward_scaled(A, B, o, scale)
        gamma = alpha * beta
        gamma /= gamma.sum(axis=1, keepdims=True)
        xi = kernels.xi_sum(alpha, beta, scale, A, B, o)

        new_pi = gamma[0]
        occupancy = xi.sum(axis=1)
        new_A = A.copy()
        visited = occupancy > 0
        new_A[visited] = xi[visited] / occupancy[visited, None]
        counts = gamma.T @ onehot + floor
        totals = counts.sum(axis=1)
        new_B = B.copy()
        seen = totals > 0
        new_B[seen] = counts[seen] / totals[seen, None]

        pi, A, B = new_pi / new_pi.sum(), new_A, new_B
        current = model.replace(transition=A, emission=B, initial=pi)
        if callback is not None:
            callback(k + 1, current)
        A, B, pi = (np.ascontiguousarray(x) for x in (A, B, pi))
    return TrainingResult(current, trace, converged)
