"""Kernel backend selection.

The compiled extension ``hmmtrend._kernels`` is used when it imports;
otherwise the numpy reference ``hmmtrend._kernels_py`` is used. Setting
``HMMTREND_BACKEND=python`` forces the fallback.
"""

import os

from . import _kernels_py

python_backend = _kernels_py

try:
    from . import _kernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

if compiled_backend is not None and os.environ.get("HMMTREND_BACKEND", "").lower() != "python":
    backend = compiled_backend
    BACKEND = "cython"
else:
    backend = python_backend
    BACKEND = "python"

forward_scaled = backend.forward_scaled
backward_scaled = backend.backward_scaled
xi_sum = backend.xi_sum
viterbi = backend.viterbi
sample_path = backend.sample_path

__all__ = [
    "BACKEND",
    "backend",
    "compiled_backend",
    "python_backend",
    "forward_scaled",
    "backward_scaled",
    "xi_sum",
    "viterbi",
    "sample_path",
]
