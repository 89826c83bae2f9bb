"""Hot kernels with an optional numba backend.

Set ``BIUNITARY_NUMBA=0`` to force the pure-numpy path.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and os.environ.get("BIUNITARY_NUMBA", "1") != "0"


def _apply_window_numpy(psi, gate):
    # psi: (B, W, I, E, R); gate: (W, E, O, I) -> (B, W, O, E, R)
    return np.einsum("weoi,bwier->bwoer", gate, psi, optimize=True)


def _apply_window_loops(psi, gate):
    nb, nw, ni, ne, nr = psi.shape
    no = gate.shape[2]
    out = np.zeros((nb, nw, no, ne, nr), dtype=np.complex128)
    for b in range(nb):
        for w in range(nw):
            for e in range(ne):
                for o in range(no):
                    for i in range(ni):
                        g = gate[w, e, o, i]
                        if g == 0:
                            continue
                        for r in range(nr):
                            out[b, w, o, e, r] += g * psi[b, w, i, e, r]
    return out


if USE_NUMBA:
    _apply_window_jit = numba.njit(cache=True)(_apply_window_loops)
else:
    _apply_window_jit = None


def apply_window(psi: np.ndarray, gate: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Apply a controlled gate to the middle axes of a 5-axis state block.

    ``gate[w, e]`` is the target matrix for control values ``(w, e)``.
    """
    if backend is None:
        backend = "numba" if USE_NUMBA else "numpy"
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    gate = np.ascontiguousarray(gate, dtype=np.complex128)
    if backend == "numba":
        if _apply_window_jit is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return _apply_window_jit(psi, gate)
    if backend == "numpy":
        return _apply_window_numpy(psi, gate)
    raise ValueError(f"unknown backend {backend!r}")
