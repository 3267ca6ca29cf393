"""Compare the compiled kernels with the NumPy fallback.

Usage::

    python bench/benchmark_kernels.py [--repeat 200] [--end-to-end]

Prints per-call timings for each kernel and the speedup. ``--end-to-end``
also times a full Algorithm 2 run on ``lp15-box`` under each backend, in a
subprocess with ``BANACHVI_PURE_PYTHON`` set accordingly.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from banachvi._kernels import _fallback

try:
    from banachvi._kernels import _core
except ImportError:
    _core = None


def cases(rng):
    d = 3
    xi, c = rng.normal(size=d) * 2, rng.normal(size=d)
    lo, hi = -np.ones(d) * 1.5, np.ones(d) * 2.0
    a = rng.normal(size=d)
    ug = np.linspace(-5, 5, 401)
    return {
        "duality_map": lambda k: k.duality_map(xi, 1.5),
        "separable_solve": lambda k: k.separable_solve(xi, 0.7, c, lo, hi, 1.5),
        "box_halfspace_solve": lambda k: k.box_halfspace_solve(xi, a, 0.1, lo, hi, 1.5),
        "quad_resolvent_scan": lambda k: k.quad_resolvent_scan(16.0, 9.0, -25.0, 1.0, 0.0,
                                                               2.0, 3.0, ug, ug),
    }


def per_call(fn, repeat):
    return min(timeit.repeat(fn, number=repeat, repeat=3)) / repeat


END_TO_END = ("from banachvi import registry; from banachvi.algorithms import *; import time;"
              "e = registry.get('lp15-box'); t0 = time.perf_counter();"
              "run_algorithm2(e.problem, e.schedule('alg2'), e.x0, StopRule(1e-300, 1e-300, 200));"
              "print(time.perf_counter() - t0)")


def end_to_end(pure):
    env = dict(os.environ)
    if pure:
        env["BANACHVI_PURE_PYTHON"] = "1"
    else:
        env.pop("BANACHVI_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True,
                         text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=200)
    parser.add_argument("--end-to-end", action="store_true")
    args = parser.parse_args(argv)

    if _core is None:
        print("compiled extension not built; only the fallback is timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'python [us]':>14}{'cython [us]':>14}{'speedup':>10}")
    for name, call in cases(rng).items():
        t_py = per_call(lambda: call(_fallback), args.repeat) * 1e6
        if _core is not None:
            t_cy = per_call(lambda: call(_core), args.repeat) * 1e6
            print(f"{name:<22}{t_py:>14.1f}{t_cy:>14.1f}{t_py / t_cy:>10.1f}")
        else:
            print(f"{name:<22}{t_py:>14.1f}{'-':>14}{'-':>10}")
    if args.end_to_end:
        t_py = end_to_end(pure=True)
        line = f"{'alg2 lp15-box x200':<22}{t_py * 1e6:>14.0f}"
        if _core is not None:
            t_cy = end_to_end(pure=False)
            line += f"{t_cy * 1e6:>14.0f}{t_py / t_cy:>10.1f}"
        print(line)


if __name__ == "__main__":
    main()
