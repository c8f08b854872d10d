"""Reference kernels in numpy; used when the compiled extension is absent.

Signatures match ``_kernels.pyx`` exactly. Inputs are assumed validated by
the caller (contiguous float64 matrices, int64 index sequences).
"""

import numpy as np


def forward_scaled(pi, A, B, obs):
    """Scaled forward pass.

    Returns ``(alpha, scale)`` where each ``alpha[t]`` sums to one and
    ``scale[t]`` is the normalizer of step t. A zero normalizer stops the
    recursion; the remaining rows are left at zero.
    """
    T = obs.shape[0]
    N = A.shape[0]
    alpha = np.zeros((T, N))
    scale = np.zeros(T)
    a = pi * B[:, obs[0]]
    for t in range(T):
        if t > 0:
            a = (alpha[t - 1] @ A) * B[:, obs[t]]
        c = a.sum()
        scale[t] = c
        if c <= 0.0:
            break
        alpha[t] = a / c
    return alpha, scale


def backward_scaled(A, B, obs, scale):
    T = obs.shape[0]
    N = A.shape[0]
    beta = np.zeros((T, N))
    beta[T - 1] = 1.0
    for t in range(T - 2, -1, -1):
        beta[t] = A @ (B[:, obs[t + 1]] * beta[t + 1]) / scale[t + 1]
    return beta


def xi_sum(alpha, beta, scale, A, B, obs):
    """Sum over t of the pairwise posteriors ``P(s_t = i, s_{t+1} = j | O)``."""
    T = obs.shape[0]
    N = A.shape[0]
    out = np.zeros((N, N))
    for t in range(T - 1):
        out += np.outer(alpha[t], B[:, obs[t + 1]] * beta[t + 1]) * A / scale[t + 1]
    return out


def viterbi(log_pi, log_A, log_B, obs):
    """Most probable path in log space; ties resolve to the lowest index."""
    T = obs.shape[0]
    N = log_A.shape[0]
    delta = log_pi + log_B[:, obs[0]]
    back = np.zeros((T, N), dtype=np.int64)
    for t in range(1, T):
        cand = delta[:, None] + log_A
        # argmax returns the first maximum, i.e. the lowest source index
        back[t] = np.argmax(cand, axis=0)
        delta = cand[back[t], np.arange(N)] + log_B[:, obs[t]]
    path = np.zeros(T, dtype=np.int64)
    path[T - 1] = int(np.argmax(delta))
    best = float(delta[path[T - 1]])
    for t in range(T - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return path, best


def _draw(cdf_row, last, u):
    j = int(np.searchsorted(cdf_row, u, side="right"))
    return last if j >= cdf_row.shape[0] else j


def sample_path(cdf_A, cdf_B, last_A, last_B, start, uniforms, carried):
    """Inverse-CDF sampling of a state/symbol path from pre-drawn uniforms.

    ``uniforms[t, 0]`` drives the transition and ``uniforms[t, 1]`` the
    emission of step t. With ``carried`` false the chain transitions out of
    ``start`` before the first emission and each state emits its own symbol.
    With ``carried`` true, position 0 is ``start`` with symbol -1 and the
    symbol at position p is emitted by the state at position p - 1.
    """
    L = uniforms.shape[0]
    states = np.empty(L, dtype=np.int64)
    symbols = np.empty(L, dtype=np.int64)
    if carried:
        s = start
        states[0] = s
        symbols[0] = -1
        for p in range(1, L):
            symbols[p] = _draw(cdf_B[s], last_B[s], uniforms[p, 1])
            s = _draw(cdf_A[s], last_A[s], uniforms[p, 0])
            states[p] = s
    else:
        s = start
        for t in range(L):
            s = _draw(cdf_A[s], last_A[s], uniforms[t, 0])
            states[t] = s
            symbols[t] = _draw(cdf_B[s], last_B[s], uniforms[t, 1])
    return states, symbols
