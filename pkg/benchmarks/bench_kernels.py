"""Compare the numba kernels with their numpy/Python fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Both paths live in one process: ``kernels.*_py`` are the uncompiled
functions, so the env flag does not need to be toggled. The first numba call
is timed separately because it includes compilation.
"""

import argparse
import math
import time

import numpy as np

from leo_ntn import harq, kernels
from leo_ntn.impairments import _cos_elevation, _doppler_scale
from leo_ntn.geometry import slant_range
from leo_ntn.scenario import ScenarioConfig


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def surface_case(n_el, n_rb):
    cfg = ScenarioConfig()
    el = np.linspace(cfg.min_elevation_rad, math.pi / 2, n_el)
    rb = np.linspace(0.0, 50e3, n_rb)
    d = np.array([slant_range(cfg, float(e)) for e in el])
    args = (_doppler_scale(cfg), _cos_elevation(el), d, rb)
    return lambda f: f(*args)


def harq_case(n_proc, duration_s):
    cfg = harq.HarqConfig(num_processes=n_proc, success_prob=(0.6, 0.8, 0.95), seed=1)
    return lambda use_numba: harq.simulate(cfg, duration_s, use_numba=use_numba)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not kernels.USE_NUMBA:
        print("numba disabled by environment; only the fallback path is timed")

    print(f"{'case':<34}{'numba first':>13}{'numba':>11}{'fallback':>11}{'speedup':>9}")
    cases = [
        ("residual surface 46x51", surface_case(46, 51), kernels.residual_surface,
         kernels.residual_surface_py),
        ("residual surface 901x1001", surface_case(901, 1001), kernels.residual_surface,
         kernels.residual_surface_py),
    ]
    rows = [(name, lambda f=fast, c=case: c(f), lambda f=slow, c=case: c(f))
            for name, case, fast, slow in cases]
    for n, dur in ((8, 20.0), (24, 20.0), (24, 200.0)):
        sim = harq_case(n, dur)
        rows.append((f"harq simulate N={n} {dur:g} s", lambda s=sim: s(True), lambda s=sim: s(False)))

    for name, fast, slow in rows:
        slow_t = _best(slow, args.repeat)
        if kernels.USE_NUMBA:
            t0 = time.perf_counter()
            fast()
            first = time.perf_counter() - t0
            fast_t = _best(fast, args.repeat)
            print(f"{name:<34}{first * 1e3:>11.3f}ms{fast_t * 1e3:>9.3f}ms{slow_t * 1e3:>9.3f}ms"
                  f"{slow_t / fast_t:>8.1f}x")
        else:
            print(f"{name:<34}{'-':>13}{'-':>11}{slow_t * 1e3:>9.3f}ms{'-':>9}")


if __name__ == "__main__":
    main()
