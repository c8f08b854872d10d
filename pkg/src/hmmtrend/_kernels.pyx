# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the forward/backward/Viterbi recursions and sampling.

Drop-in replacement for ``_kernels_py``; same signatures and results.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.float64_t f64
ctypedef cnp.int64_t i64


def forward_scaled(const f64[::1] pi, const f64[:, ::1] A, const f64[:, ::1] B,
                   const i64[::1] obs):
    cdef Py_ssize_t T = obs.shape[0], N = A.shape[0]
    cdef Py_ssize_t t, i, j
    cdef f64 c, acc
    alpha_arr = np.zeros((T, N))
    scale_arr = np.zeros(T)
    cdef f64[:, ::1] alpha = alpha_arr
    cdef f64[::1] scale = scale_arr
    cdef f64[::1] a = np.empty(N)

    for t in range(T):
        if t == 0:
            for j in range(N):
                a[j] = pi[j] * B[j, obs[0]]
        else:
            for j in range(N):
                acc = 0.0
                for i in range(N):
                    acc += alpha[t - 1, i] * A[i, j]
                a[j] = acc * B[j, obs[t]]
        c = 0.0
        for j in range(N):
            c += a[j]
        scale[t] = c
        if c <= 0.0:
            break
        for j in range(N):
            alpha[t, j] = a[j] / c
    return alpha_arr, scale_arr


def backward_scaled(const f64[:, ::1] A, const f64[:, ::1] B, const i64[::1] obs,
                    const f64[::1] scale):
    cdef Py_ssize_t T = obs.shape[0], N = A.shape[0]
    cdef Py_ssize_t t, i, j
    cdef f64 acc
    beta_arr = np.zeros((T, N))
    cdef f64[:, ::1] beta = beta_arr
    cdef f64[::1] w = np.empty(N)

    for i in range(N):
        beta[T - 1, i] = 1.0
    for t in range(T - 2, -1, -1):
        for j in range(N):
            w[j] = B[j, obs[t + 1]] * beta[t + 1, j]
        for i in range(N):
            acc = 0.0
            for j in range(N):
                acc += A[i, j] * w[j]
            beta[t, i] = acc / scale[t + 1]
    return beta_arr


def xi_sum(const f64[:, ::1] alpha, const f64[:, ::1] beta, const f64[::1] scale,
           const f64[:, ::1] A, const f64[:, ::1] B, const i64[::1] obs):
    cdef Py_ssize_t T = obs.shape[0], N = A.shape[0]
    cdef Py_ssize_t t, i, j
    cdef f64 inv
    out_arr = np.zeros((N, N))
    cdef f64[:, ::1] out = out_arr
    cdef f64[::1] w = np.empty(N)

    for t in range(T - 1):
        inv = 1.0 / scale[t + 1]
        for j in range(N):
            w[j] = B[j, obs[t + 1]] * beta[t + 1, j] * inv
        for i in range(N):
            for j in range(N):
                out[i, j] += alpha[t, i] * A[i, j] * w[j]
    return out_arr


def viterbi(const f64[::1] log_pi, const f64[:, ::1] log_A, const f64[:, ::1] log_B,
            const i64[::1] obs):
    cdef Py_ssize_t T = obs.shape[0], N = log_A.shape[0]
    cdef Py_ssize_t t, i, j, arg
    cdef f64 best, v
    back_arr = np.zeros((T, N), dtype=np.int64)
    path_arr = np.zeros(T, dtype=np.int64)
    cdef i64[:, ::1] back = back_arr
    cdef i64[::1] path = path_arr
    cdef f64[::1] delta = np.empty(N)
    cdef f64[::1] nxt = np.empty(N)

    for j in range(N):
        delta[j] = log_pi[j] + log_B[j, obs[0]]
    for t in range(1, T):
        for j in range(N):
            arg = 0
            best = delta[0] + log_A[0, j]
            for i in range(1, N):
                v = delta[i] + log_A[i, j]
                if v > best:
                    best = v
                    arg = i
            back[t, j] = arg
            nxt[j] = best + log_B[j, obs[t]]
        for j in range(N):
            delta[j] = nxt[j]

    arg = 0
    best = delta[0]
    for j in range(1, N):
        if delta[j] > best:
            best = delta[j]
            arg = j
    path[T - 1] = arg
    for t in range(T - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return path_arr, float(best)


cdef inline i64 _draw(const f64[:, ::1] cdf, Py_ssize_t row, i64 last, f64 u) noexcept nogil:
    cdef Py_ssize_t j, n = cdf.shape[1]
    for j in range(n):
        if u < cdf[row, j]:
            return j
    return last


def sample_path(const f64[:, ::1] cdf_A, const f64[:, ::1] cdf_B, const i64[::1] last_A,
                const i64[::1] last_B, i64 start, const f64[:, ::1] uniforms, bint carried):
    cdef Py_ssize_t L = uniforms.shape[0], t
    cdef i64 s = start
    states_arr = np.empty(L, dtype=np.int64)
    symbols_arr = np.empty(L, dtype=np.int64)
    cdef i64[::1] states = states_arr
    cdef i64[::1] symbols = symbols_arr

    with nogil:
        if carried:
            states[0] = s
            symbols[0] = -1
            for t in range(1, L):
                symbols[t] = _draw(cdf_B, s, last_B[s], uniforms[t, 1])
                s = _draw(cdf_A, s, last_A[s], uniforms[t, 0])
                states[t] = s
        else:
            for t in range(L):
                s = _draw(cdf_A, s, last_A[s], uniforms[t, 0])
                states[t] = s
                symbols[t] = _draw(cdf_B, s, last_B[s], uniforms[t, 1])
    return states_arr, symbols_arr
