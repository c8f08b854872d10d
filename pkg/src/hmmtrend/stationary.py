"""Stationary distribution of a finite Markov chain."""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ConvergenceError, InputError, NonUniqueStationaryError

METHODS = ("linear", "power")


def closed_classes(transition) -> list[list[int]]:
    """Closed communicating classes of the chain, each a sorted index list.

    A class is closed when no positive-probability edge leaves it.
    """
    P = np.asarray(transition, dtype=float)
    adjacency = csr_matrix(P > 0)
    n_comp, labels = connected_components(adjacency, directed=True, connection="strong")
    leaves = np.zeros(n_comp, dtype=bool)
    src, dst = np.nonzero(P > 0)
    leaves[labels[src][labels[src] != labels[dst]]] = True
    return [np.flatnonzero(labels == c).tolist() for c in range(n_comp) if not leaves[c]]


def _residual(pi, P) -> float:
    return float(np.abs(pi @ P - pi).sum())


def _linear(P: np.ndarray) -> np.ndarray:
    n = P.shape[0]
    system = np.vstack([P.T - np.eye(n), np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    return pi


def _power(P: np.ndarray, max_iter: int, residual_tol: float) -> np.ndarray:
    # lazy chain (P + I) / 2 has the same fixed point and is aperiodic
    lazy = 0.5 * (P + np.eye(P.shape[0]))
    pi = np.full(P.shape[0], 1.0 / P.shape[0])
    for _ in range(max_iter):
        pi = pi @ lazy
        pi /= pi.sum()
        if _residual(pi, P) <= residual_tol:
            return pi
    raise ConvergenceError(
        f"power iteration did not reach residual {residual_tol:g} in {max_iter} iterations "
        f"(residual {_residual(pi, P):.3g})"
    )


def stationary_distribution(
    transition,
    method: str = "linear",
    max_iter: int = 100_000,
    residual_tol: float = 1e-10,
    state_names=None,
) -> np.ndarray:
    """Unique probability vector ``pi`` with ``pi @ P == pi``.

    Parameters
    ----------
    transition : (N, N) array_like
        Row-stochastic transition matrix.
    method : {"linear", "power"}
        ``"linear"`` solves ``(P^T - I) pi = 0`` together with ``sum(pi) = 1``;
        ``"power"`` iterates the lazy chain until the residual is met.
    max_iter, residual_tol
        Iteration cap (power only) and the L1 bound on ``pi P - pi``.
    state_names : sequence of str, optional
        Used only to label the closed classes in error messages.

    Raises
    ------
    NonUniqueStationaryError
        When the chain has more than one closed class.
    ConvergenceError
        When the residual bound is not met.
    """
    P = np.asarray(transition, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise InputError(f"transition must be square, got shape {P.shape}")
    if method not in METHODS:
        raise InputError(f"unknown method {method!r}; expected one of {METHODS}")

    classes = closed_classes(P)
    if len(classes) > 1:
        if state_names is not None:
            shown = [[state_names[i] for i in c] for c in classes]
        else:
            shown = classes
        raise NonUniqueStationaryError(
            f"stationary distribution is not unique: {len(classes)} closed classes {shown}",
            classes,
        )

    pi = _linear(P) if method == "linear" else _power(P, max_iter, residual_tol)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = _residual(pi, P)
    if residual > residual_tol:
        raise ConvergenceError(f"stationary residual {residual:.3g} exceeds {residual_tol:g}")
    return pi
