"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 2000] [--groups 1000]

Kernel timings call both implementations directly. The session timing runs
a fresh interpreter with EPRQSS_PURE_PYTHON=1 for the fallback side.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from eprqss import _kernels_py

try:
    from eprqss import _ckernels
except ImportError:
    _ckernels = None

SESSION_SNIPPET = (
    "import time, math;"
    "from eprqss.protocol import SessionConfig, run_session;"
    "from eprqss.adversary import Individual;"
    "from eprqss import kernels;"
    "t=time.perf_counter();"
    "run_session(SessionConfig(n_groups={groups}, p_check=0.5, seed=1, epsilon_threshold=1), Individual(math.pi/6));"
    "print(kernels.BACKEND, time.perf_counter()-t)"
)


def kernel_cases(n=4):
    rng = np.random.default_rng(0)
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    amps /= np.linalg.norm(amps)
    u2 = np.array([[0, 1], [1, 0]], dtype=complex)
    u4 = np.eye(4, dtype=complex)
    return {
        "apply_1q": (amps, n, 1, u2),
        "apply_2q": (amps, n, 0, 2, u4),
        "qubit_probs": (amps, n, 1),
        "project_qubit": (amps, n, 1, u2[0]),
        "pair_probs": (amps, n, 0, 2, u4),
        "project_pair": (amps, n, 0, 2, u4[1]),
    }


def session_time(groups, pure):
    env = dict(os.environ)
    if pure:
        env["EPRQSS_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", SESSION_SNIPPET.format(groups=groups)],
                         env=env, capture_output=True, text=True, check=True)
    backend, seconds = out.stdout.split()
    return backend, float(seconds)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=2000)
    ap.add_argument("--groups", type=int, default=1000)
    args = ap.parse_args()

    print(f"{'kernel':<15}{'python us':>12}{'cython us':>12}{'speedup':>10}")
    for name, call_args in kernel_cases().items():
        py = timeit.timeit(lambda: getattr(_kernels_py, name)(*call_args), number=args.repeat)
        row = f"{name:<15}{py / args.repeat * 1e6:>12.2f}"
        if _ckernels is not None:
            cy = timeit.timeit(lambda: getattr(_ckernels, name)(*call_args), number=args.repeat)
            row += f"{cy / args.repeat * 1e6:>12.2f}{py / cy:>10.1f}"
        print(row)

    print(f"\nsession, {args.groups} groups, individual attack, p_check 0.5")
    for pure in (False, True):
        backend, seconds = session_time(args.groups, pure)
        print(f"  {backend:<8}{seconds:8.2f} s")


if __name__ == "__main__":
    main()
