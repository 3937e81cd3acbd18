"""Time the simulation kernels with and without numba.

Each backend runs in its own interpreter because LEVYOU_DISABLE_NUMBA is
read at import time.  Usage: ``python benchmarks/bench_kernels.py``.
"""
import json
import os
import subprocess
import sys

CHILD = r"""
import json, time
import numpy as np
from levyou import _kernels
from levyou._accel import backend

rng = np.random.default_rng(0)
noise = rng.standard_normal((4096, 1000)) * 0.1
x0 = np.zeros(4096)
path_noise = rng.standard_normal(2_000_000) * 0.1
_kernels.ensemble(x0[:2], noise[:2, :10], 0.99, 5)      # compile outside the timing
_kernels.trajectory(0.0, path_noise[:10], 0.99)

def best(fn, repeat=5):
    out = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t)
    return min(out)

res = {
    "backend": backend(),
    "ensemble_4096x1000_s": best(lambda: _kernels.ensemble(x0, noise, 0.99, 10)),
    "trajectory_2e6_s": best(lambda: _kernels.trajectory(0.0, path_noise, 0.99)),
    "checksum": float(_kernels.ensemble(x0, noise, 0.99, 10).sum()
                      + _kernels.trajectory(0.0, path_noise, 0.99).sum()),
}
print(json.dumps(res))
"""


def run(disable):
    env = dict(os.environ)
    env.pop("LEVYOU_DISABLE_NUMBA", None)
    if disable:
        env["LEVYOU_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", CHILD], env=env, capture_output=True,
                         text=True, check=True)
    return json.loads(out.stdout)


def main():
    fast, slow = run(False), run(True)
    for key in ("ensemble_4096x1000_s", "trajectory_2e6_s"):
        print(f"{key:24s} {fast['backend']:>6s} {fast[key]:8.4f}s   "
              f"{slow['backend']:>6s} {slow[key]:8.4f}s   speedup {slow[key] / fast[key]:6.1f}x")
    print("checksums identical:", fast["checksum"] == slow["checksum"])


if __name__ == "__main__":
    main()
