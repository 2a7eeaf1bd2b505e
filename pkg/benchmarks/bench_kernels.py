"""Time the numba and numpy kernel backends on the hot paths.

    python benchmarks/bench_kernels.py [--n 1000000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from prevadim import kernels
from prevadim.cantor import CantorConfig, build_levels, sample_nu_coded
from prevadim.labeling import draw_seeds, make_rng, seed_keys


def best(fn, repeat):
    fn()  # warm-up (numba compiles here)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=10 ** 6)
    ap.add_argument("--depth", type=int, default=24)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()

    lv = build_levels(CantorConfig.tower(a.depth))
    rng = make_rng(0)
    x = rng.random(a.n)
    _, digits = sample_nu_coded(lv, rng, a.n)
    sk = np.uint64(kernels.seed_key(1))
    keys = kernels.path_keys(digits[:1])[0]
    seeds = seed_keys(draw_seeds(rng, a.n))
    args = (lv.branching, lv.c, lv.s)

    cases = {
        "locate": lambda b: b.locate(x, *args),
        "phi_at": lambda b: b.phi_at(x, *args, sk, -1),
        "positions": lambda b: b.positions(digits, *args),
        "path_keys": lambda b: b.path_keys(digits),
        "bit_matrix": lambda b: b.bit_matrix(keys, seeds),
    }
    backends = {"numpy": kernels.get_backend("numpy")}
    if kernels.NUMBA_AVAILABLE:
        backends["numba"] = kernels.get_backend("numba")

    print(f"n = {a.n}, depth = {a.depth}, best of {a.repeat}")
    print(f"{'kernel':<12}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for name, call in cases.items():
        t = {k: best(lambda: call(b), a.repeat) for k, b in backends.items()}
        speed = f"{t['numpy'] / t['numba']:>9.1f}x" if "numba" in t else ""
        print(f"{name:<12}" + "".join(f"{v * 1e3:>10.1f}ms" for v in t.values()) + speed)


if __name__ == "__main__":
    main()
