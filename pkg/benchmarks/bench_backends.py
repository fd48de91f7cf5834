"""Timing comparison: numba-jitted kernels vs their pure-numpy twins.

Run as a script.  Micro-benchmarks call both kernel sets directly in one
process; the end-to-end rows re-launch the interpreter with ELLCAS_BACKEND
set, because the package binds its kernel table once at import.

    python3 benchmarks/bench_backends.py          # full table
    python3 benchmarks/bench_backends.py --quick  # fewer repeats
"""

from __future__ import annotations

import argparse
import math
import os
import subprocess
import sys
import time

import numpy as np

from ellcas.backend import get_kernels

_END_TO_END = r"""
import math, time
import ellcas as ec
ec.warmup()
g = ec.Geometry(surface=ec.EllipticSurface(d=1.0, mu0=0.0), H=2.0,
                phi=0.5 * math.pi)
t0 = time.perf_counter()
res = ec.em_energy(g, m_max=6)
print(time.perf_counter() - t0, res.value)
"""


def best_of(fn, repeats: int, number: int) -> float:
    """Best per-call time over `repeats` batches of `number` calls."""
    fn()  # warm (JIT compile, caches)
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(number):
            fn()
        best = min(best, (time.perf_counter() - t0) / number)
    return best


def micro_cases():
    rng = np.random.default_rng(20240817)
    n = 80
    diag = (2.0 * np.arange(n)) ** 2
    off = np.full(n - 1, 12.5)

    mat = rng.standard_normal((30, 30)) * 0.05 + np.eye(30)

    kh = np.arange(0, 72, 2, dtype=np.float64)
    sg = np.where(np.arange(36) % 3 == 0, -1.0, 1.0).astype(np.float64)
    lg = -0.35 * kh - 1.0
    us = np.linspace(0.0, 2.2, 160)

    return [
        ("log_bessel_i(60, 35)", lambda k: k.log_bessel_i(60, 35.0)),
        ("log_bessel_k(60, 35)", lambda k: k.log_bessel_k(60, 35.0)),
        ("tridiag_eigenpair(n=80)", lambda k: k.tridiag_eigenpair(diag, off, 3)),
        ("angular_tables(36x160)",
         lambda k: k.angular_tables(kh, sg, lg, 2.1, us, True)),
        ("lu_logdet(30x30)", lambda k: k.lu_logdet(mat.copy())),
    ]


def run_end_to_end(backend: str) -> tuple[float, float]:
    env = dict(os.environ, ELLCAS_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", _END_TO_END], env=env,
                         capture_output=True, text=True, check=True)
    t, v = out.stdout.split()
    return float(t), float(v)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--quick", action="store_true", help="fewer repeats")
    ap.add_argument("--skip-e2e", action="store_true",
                    help="micro-benchmarks only")
    args = ap.parse_args()
    repeats, number = (3, 20) if args.quick else (7, 100)

    backends = {}
    for name in ("numba", "numpy"):
        try:
            backends[name] = get_kernels(name)
        except Exception as exc:  # numba may be absent
            print(f"backend {name} unavailable: {exc}", file=sys.stderr)
    if "numpy" not in backends:
        print("numpy backend is required", file=sys.stderr)
        return 1

    rows = []
    for label, call in micro_cases():
        times = {}
        for name, kern in backends.items():
            times[name] = best_of(lambda k=kern: call(k), repeats, number)
        rows.append((label, times))

    width = max(len(r[0]) for r in rows) + 2
    head = f"{'kernel':<{width}}" + "".join(f"{n:>12}" for n in backends)
    if len(backends) == 2:
        head += f"{'speedup':>10}"
    print(head)
    print("-" * len(head))
    for label, times in rows:
        line = f"{label:<{width}}"
        for name in backends:
            line += f"{times[name] * 1e6:>10.1f}us"
        if len(backends) == 2:
            line += f"{times['numpy'] / times['numba']:>9.1f}x"
        print(line)

    if not args.skip_e2e:
        print()
        print("end-to-end em_energy(strip, H=2d, phi=90deg, m_max=6):")
        vals = {}
        for name in backends:
            t, v = run_end_to_end(name)
            vals[name] = v
            print(f"  {name:>6}: {t:8.2f} s   E*d^2 = {v:.12e}")
        if len(vals) == 2:
            rel = abs(vals["numba"] - vals["numpy"]) / abs(vals["numpy"])
            print(f"  cross-backend relative difference: {rel:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
