"""Time gate application with the numba kernel and the numpy einsum path.

Run: python benchmarks/bench_kernels.py [L ...]
"""

import sys
import time

import numpy as np

from biunitary_circuits import _accel, build_diagram, compile_circuit, fill_diagram
from biunitary_circuits.compiler import apply_layers


def bench(L: int, backend: str, repeat: int = 3) -> float:
    d = build_diagram(L, 4, "brickwork")
    c = compile_circuit(fill_diagram(d, "random-du", seed=0), verify=False)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=(1, c.cut_dim(0))) + 1j * rng.normal(size=(1, c.cut_dim(0)))
    apply_layers(c, psi, backend=backend)  # warm-up (jit compile)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        apply_layers(c, psi, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main(sizes):
    backends = ["numpy"] + (["numba"] if _accel.USE_NUMBA else [])
    print("L  " + "  ".join(f"{b:>10}" for b in backends))
    for L in sizes:
        print(f"{L:<3}" + "  ".join(f"{bench(L, b) * 1e3:>8.2f}ms" for b in backends))


if __name__ == "__main__":
    main([int(x) for x in sys.argv[1:]] or [8, 10, 12, 14])
