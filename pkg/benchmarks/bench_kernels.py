"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--length 20000] [--states 6] [--repeat 5]

Each row reports the best of ``--repeat`` runs per backend and the speedup.
"""

import argparse
import timeit

import numpy as np

from hmmtrend import HmmModel, kernels
from hmmtrend.generator import _cdf_tables


def _model(rng, n, m):
    A = rng.dirichlet(np.ones(n), size=n)
    B = rng.dirichlet(np.ones(m), size=n)
    pi = rng.dirichlet(np.ones(n))
    return HmmModel([f"s{i}" for i in range(n)], [f"o{i}" for i in range(m)], A, B, pi)


def _cases(model, obs, uniforms):
    pi, A, B = (np.ascontiguousarray(x) for x in (model.initial, model.transition, model.emission))
    log_pi, log_A, log_B = np.log(pi), np.log(A), np.log(B)
    cdf_A, last_A = _cdf_tables(A)
    cdf_B, last_B = _cdf_tables(B)

    def make(backend):
        alpha, scale = backend.forward_scaled(pi, A, B, obs)
        beta = backend.backward_scaled(A, B, obs, scale)
        return {
            "forward": lambda: backend.forward_scaled(pi, A, B, obs),
            "backward": lambda: backend.backward_scaled(A, B, obs, scale),
            "xi_sum": lambda: backend.xi_sum(alpha, beta, scale, A, B, obs),
            "viterbi": lambda: backend.viterbi(log_pi, log_A, log_B, obs),
            "sample": lambda: backend.sample_path(cdf_A, cdf_B, last_A, last_B, 0, uniforms, False),
        }

    return make


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--length", type=int, default=20_000, help="sequence length T")
    parser.add_argument("--states", type=int, default=6)
    parser.add_argument("--symbols", type=int, default=2)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    model = _model(rng, args.states, args.symbols)
    obs = rng.integers(0, args.symbols, args.length).astype(np.int64)
    uniforms = rng.random((args.length, 2))
    make = _cases(model, obs, uniforms)

    backends = {"python": kernels.python_backend}
    if kernels.compiled_backend is not None:
        backends["cython"] = kernels.compiled_backend
    else:
        print("compiled extension not built; timing the numpy fallback only")
    timed = {}
    for name, backend in backends.items():
        for kernel, fn in make(backend).items():
            timed[name, kernel] = min(timeit.repeat(fn, number=1, repeat=args.repeat))

    print(f"T={args.length} N={args.states} M={args.symbols}, best of {args.repeat}")
    print(f"{'kernel':<10} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for kernel in make(kernels.python_backend):
        py = timed["python", kernel] * 1e3
        if "cython" in backends:
            cy = timed["cython", kernel] * 1e3
            print(f"{kernel:<10} {py:>10.2f} {cy:>10.2f} {py / cy:>7.1f}x")
        else:
            print(f"{kernel:<10} {py:>10.2f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
