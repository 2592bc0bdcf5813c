"""Compare the numba kernels with the pure numpy fallback.

Two measurements:
  * the batched cyclotomic matrix product on random integer data, both
    backends in this process;
  * an end-to-end verification of graded M_n, run once per backend in a
    subprocess (the backend is picked at import time via GRADINGS_DISABLE_NUMBA).

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from gradings import _kernels
from gradings.cyclotomic import reduction_table, totient


def time_call(fn, repeat):
    fn()  # warm up (and compile)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def bench_matmul(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for N, b, n in [(4, 36, 6), (8, 36, 6), (3, 144, 12), (12, 16, 8)]:
        d = totient(N)
        red = reduction_table(N)
        A = rng.integers(-3, 4, size=(b, n, n, d))
        A[rng.random(A.shape) < 0.7] = 0  # constructed bases are sparse
        B = rng.integers(-3, 4, size=(b, n, n, d))
        t_np = time_call(lambda: _kernels.kmatmul_numpy(A, B, red), repeat)
        if _kernels.HAVE_NUMBA:
            t_nb = time_call(lambda: _kernels._kmatmul_nb(A, B, red), repeat)
            same = np.array_equal(_kernels._kmatmul_nb(A, B, red), _kernels.kmatmul_numpy(A, B, red))
        else:
            t_nb, same = float("nan"), True
        rows.append((N, b, n, t_np, t_nb, same))
    print("kmatmul  N  batch  n   numpy(ms)  numba(ms)  speedup  equal")
    for N, b, n, t_np, t_nb, same in rows:
        print(f"        {N:2d} {b:6d} {n:3d} {t_np * 1e3:10.2f} {t_nb * 1e3:10.2f} {t_np / t_nb:8.1f}x  {same}")


_VERIFY_SNIPPET = """
import json, time
from gradings import _kernels
from gradings.abgroup import GroupSpec
from gradings.enumeration import enum_matrix_gradings
from gradings.graded_matrix import construct_matrix_grading, verify_associative_grading
algs = [construct_matrix_grading(e.params) for e in enum_matrix_gradings(GroupSpec.cyclic(2, 4), 6).entries[:40]]
verify_associative_grading(algs[0])
t = time.perf_counter()
ok = all(verify_associative_grading(A).ok for A in algs)
print(json.dumps({"backend": _kernels.backend(), "seconds": time.perf_counter() - t, "ok": ok, "count": len(algs)}))
"""


def bench_verify():
    out = {}
    for disable in ("0", "1"):
        env = dict(os.environ, GRADINGS_DISABLE_NUMBA=disable)
        res = subprocess.run([sys.executable, "-c", _VERIFY_SNIPPET], env=env, capture_output=True, text=True,
                             check=True)
        r = json.loads(res.stdout.strip().splitlines()[-1])
        out[r["backend"]] = r
    print("verify 40 gradings of M_6 by Z2 x Z4")
    for name, r in out.items():
        print(f"  {name:6s} {r['seconds']:.2f} s  all ok: {r['ok']}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print("backend in this process:", _kernels.backend())
    bench_matmul(args.repeat)
    bench_verify()
