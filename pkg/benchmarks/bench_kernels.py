"""Time the numba kernels against their numpy fallbacks.

Usage::

    python benchmarks/bench_kernels.py            # both backends, side by side
    python benchmarks/bench_kernels.py --inner    # current backend only (JSON)

The numpy side runs in a subprocess with ``QUIVREP_PURE_NUMPY=1`` so that the
dispatch in ``quivrep.kernels`` is exercised exactly as users would see it.
Compilation time is excluded by a warm-up call.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _cases():
    from quivrep.exhaustive import hom_matrices

    rng = np.random.default_rng(0)
    mats = hom_matrices((4, 4), (2, 4, 4))
    bits = rng.integers(0, 16, size=400)
    bits[::3] = 15
    sizes = np.array([100, 100, 100, 100], dtype=np.int64)
    starts = np.array([0, 100, 200, 300], dtype=np.int64)
    howell_inputs = [rng.integers(0, 12, size=(6, 6)) for _ in range(300)]
    return {
        "kernel_sizes": (lambda k: k.kernel_sizes(mats, np.array([4, 4]), np.array([2, 4, 4]))),
        "image_sizes": (lambda k: k.image_sizes(mats, np.array([4, 4]), np.array([2, 4, 4]))),
        "coker_invariants": (lambda k: k.coker_invariants(mats, np.array([2, 4, 4]), 4)),
        "combine_verdicts": (lambda k: k.combine_verdicts(bits, starts, sizes, 15)),
        "howell": (lambda k: [k.howell(a, 12) for a in howell_inputs]),
        "smith": (lambda k: [k.smith(a, 12) for a in howell_inputs]),
    }


def inner(repeats):
    from quivrep import kernels
    from quivrep._accel import backend

    out = {"backend": backend(), "seconds": {}}
    for name, fn in _cases().items():
        fn(kernels)  # warm-up / compilation
        best = float("inf")
        for _ in range(repeats):
            t = time.perf_counter()
            fn(kernels)
            best = min(best, time.perf_counter() - t)
        out["seconds"][name] = best
    return out


def _spawn(pure, repeats):
    env = dict(os.environ)
    env["QUIVREP_PURE_NUMPY"] = "1" if pure else "0"
    res = subprocess.run(
        [sys.executable, __file__, "--inner", "--repeats", str(repeats)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(res.stdout)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--inner", action="store_true", help="time the current backend and print JSON")
    p.add_argument("--repeats", type=int, default=5)
    args = p.parse_args(argv)
    if args.inner:
        print(json.dumps(inner(args.repeats)))
        return 0
    fast = _spawn(False, args.repeats)
    slow = _spawn(True, args.repeats)
    print(f"{'kernel':<18}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for name in fast["seconds"]:
        a, b = fast["seconds"][name], slow["seconds"][name]
        print(f"{name:<18}{a * 1e3:>10.2f}ms{b * 1e3:>10.2f}ms{b / a:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
