"""Time the hot kernels under the numba and pure-numpy backends.

Each backend runs in its own interpreter (PERC_BACKEND is read at import).
The numba column excludes compilation: every case is warmed up once first.

    python benchmarks/bench_backends.py [--repeat 3]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

# (label, python statement); sizes are small enough for the pure-Python path
CASES = [
    ("radial n=16, 200 trials", "run_radial(16, 200, 1, pi_trials=10)"),
    ("crossing n=16, 200 trials", "run_crossing(16, 200, 1)"),
    ("arms ococ r=8, 200 trials", "run_arms('ococ', 0, 8, 200, 1)"),
    ("dtail kmax=3, 200 trials", "run_dtail(3, 200, 1, pi_trials=10)"),
    ("shortcut n=16, 50 trials", "run_shortcut(16, 1.0, 50, 1)"),
]

_CHILD = r"""
import json, sys, time
from percolate import BACKEND
from percolate.harness import run_arms, run_crossing, run_dtail, run_radial, run_shortcut
cases, repeat = json.loads(sys.argv[1]), int(sys.argv[2])
out = {"backend": BACKEND, "times": []}
for label, stmt in cases:
    if BACKEND == "numba":
        eval(stmt)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = eval(stmt)
        best = min(best, time.perf_counter() - t0)
    out["times"].append([label, best, res.to_csv()])
print(json.dumps(out))
"""


def run_backend(backend: str, repeat: int) -> dict:
    env = dict(os.environ, PERC_BACKEND=backend)
    proc = subprocess.run([sys.executable, "-c", _CHILD, json.dumps(CASES), str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    fast = run_backend("numba", args.repeat)
    slow = run_backend("numpy", 1)
    if fast["backend"] != "numba":
        print("numba is not importable; only the numpy backend ran", file=sys.stderr)
    print(f"{'case':32s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>9s}  same output")
    for (label, tf, cf), (_, ts, cs) in zip(fast["times"], slow["times"]):
        print(f"{label:32s} {tf:10.4f} {ts:10.3f} {ts / tf:9.1f}x  {cf == cs}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
