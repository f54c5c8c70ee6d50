"""Compiled against pure kernels on the same graphs.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from horolab import kernels
from horolab.graph import build_ball
from horolab.spaces import free_group, free_product


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def _same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def cases():
    big = build_ball(free_group(2), 8)
    mid = build_ball(free_product([3, 4], names="st", coned=True), 4)
    small = build_ball(free_group(2), 3)
    D = np.ascontiguousarray(mid.dist, dtype=np.int32)
    Ds = np.ascontiguousarray(small.dist, dtype=np.int32)
    rng = np.random.default_rng(0)
    quads = np.stack([rng.choice(mid.n, 4, replace=False) for _ in range(20000)]).astype(np.int32)
    return [
        (f"bfs_row F2 r8 ({big.n} v)", "bfs_row", (big.indptr, big.indices, 0)),
        (f"bfs_pair_avoiding F2 r8", "bfs_pair_avoiding", (big.indptr, big.indices, 1, big.n - 1, 0)),
        (f"distance_matrix coned r4 ({mid.n} v)", "distance_matrix", (mid.indptr, mid.indices)),
        (f"four_point_max F2 r3 ({small.n} v)", "four_point_max", (Ds,)),
        (f"four_point_max coned r4 ({mid.n} v)", "four_point_max", (D,)),
        ("four_point_sampled 20000 quads", "four_point_sampled", (D, quads)),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels.compiled is None:
        print("compiled extension not built; only the pure backend is available")
    print(f"{'case':42s} {'pure':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, fn, a in cases():
        tp = _best(lambda: getattr(kernels.pure, fn)(*a), args.repeat)
        if kernels.compiled is not None:
            rp = getattr(kernels.pure, fn)(*a)
            rc = getattr(kernels.compiled, fn)(*a)
            assert _same(rp, rc), f"backends disagree on {name}"
            tc = _best(lambda: getattr(kernels.compiled, fn)(*a), args.repeat)
            print(f"{name:42s} {tp * 1e3:9.2f}ms {tc * 1e3:9.2f}ms {tp / tc:7.1f}x")
        else:
            print(f"{name:42s} {tp * 1e3:9.2f}ms {'-':>10s}")


if __name__ == "__main__":
    main()
