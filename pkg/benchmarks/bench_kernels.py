"""Numba vs numpy timings for the pointwise kernels and a full Strang step.

Kernels are timed in-process (both implementations are importable when
numba is installed). The step timing runs one subprocess per backend,
since ``FRACNLS_NUMBA`` is read at import time.

    python3 benchmarks/bench_kernels.py [--n 256] [--repeat 20]
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from fracnls import _kernels as K

STEP_SNIPPET = """
import json, sys, timeit
import numpy as np
from fracnls import GridSpec, ModelParams, step, backend
n, repeat = int(sys.argv[1]), int(sys.argv[2])
g = GridSpec(2, 6.0, n)
p = ModelParams(2, 0.8, 2.0)
r2 = g.coords[0] ** 2 + g.coords[1] ** 2
u = (1.5 * np.exp(-r2) * np.exp(0.3j * g.coords[0])).astype(complex)
step(g, u, p, 1e-3)  # compile / warm caches
t = min(timeit.repeat(lambda: step(g, u, p, 1e-3), number=5, repeat=repeat)) / 5
print(json.dumps({"backend": backend(), "step_ms": 1e3 * t}))
"""


def best(fn, repeat, number=5):
    fn()
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def kernel_table(n, repeat):
    rng = np.random.default_rng(0)
    u = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    cases = []
    for alpha in (2.0, 4.0 / 3.0):
        cases.append((f"nonlinear_phase a={alpha:.3g}",
                      lambda a=alpha: K._np_nonlinear_phase(u.copy(), a, 1e-3),
                      lambda a=alpha: K._nb_nonlinear_phase(u.copy().reshape(-1), a, 1e-3)))
        cases.append((f"power_nonlinearity a={alpha:.3g}",
                      lambda a=alpha: K._np_power_nonlinearity(u, a),
                      lambda a=alpha: K._nb_power_complex(u.reshape(-1), a, np.empty(u.size, complex))))
    cases.append(("abs_power_sum p=4", lambda: K._np_abs_power_sum(u, 4.0),
                  lambda: K._nb_abs_power_sum_complex(u.reshape(-1), 4.0)))
    cases.append(("sup_abs", lambda: K._np_sup_abs(u), lambda: K._nb_sup_abs_complex(u.reshape(-1))))
    rows = []
    for name, f_np, f_nb in cases:
        t_np = best(f_np, repeat)
        t_nb = best(f_nb, repeat) if K.HAVE_NUMBA else float("nan")
        rows.append((name, t_np, t_nb))
    # the copies are part of both timings
    t_copy = best(lambda: u.copy(), repeat)
    return rows, t_copy


def step_times(n, repeat):
    out = {}
    for flag in ("1", "0"):
        env = dict(os.environ, FRACNLS_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", STEP_SNIPPET, str(n), str(repeat)],
                             env=env, capture_output=True, text=True, check=True)
        r = json.loads(res.stdout.strip().splitlines()[-1])
        out[r["backend"]] = r["step_ms"]
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=256, help="points per axis of the 2D test array")
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)

    rows, t_copy = kernel_table(args.n, args.repeat)
    print(f"kernels on {args.n}x{args.n} complex (numba available: {K.HAVE_NUMBA}; copy {1e3 * t_copy:.3f} ms)")
    print(f"{'kernel':28s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for name, t_np, t_nb in rows:
        print(f"{name:28s} {1e3 * t_np:10.3f} {1e3 * t_nb:10.3f} {t_np / t_nb:8.2f}")

    steps = step_times(args.n, max(3, args.repeat // 4))
    print(f"\nStrang step, d=2 s=0.8 alpha=2, {args.n}^2")
    for name, ms in steps.items():
        print(f"  {name:6s} {ms:8.3f} ms/step")
    if "numba" in steps and "numpy" in steps:
        print(f"  speedup {steps['numpy'] / steps['numba']:.2f}x")


if __name__ == "__main__":
    main()
