"""Time the hot kernels with and without numba.

    python benchmarks/bench_kernels.py [--networks 5] [--repeat 3]

Each path runs in its own interpreter because the switch is read at import.
"""
import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
import numpy as np
from calctune import _accel, kernels
from calctune.calculi import CALCULI
from calctune.mce import probe_grid, mce_update, norm_targets
from calctune.sampler import SamplerConfig, sample_tables
from calctune.tuner import ProblemSet, TunerConfig, tune

n_networks, repeat = int(sys.argv[1]), int(sys.argv[2])
tables = sample_tables(SamplerConfig(seed=1, count=n_networks))
grid = probe_grid()
problems = [ProblemSet.from_probes(grid, norm_targets(t, grid)) for t in tables]  # warms the JIT


def best(fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def ipf():
    for t in tables:
        for p in grid:
            mce_update(t, p)


def objective_calls():
    ps = problems[0]
    for calc, n in enumerate(kernels.N_PARAMS):
        z = np.full(n, 0.3)
        for _ in range(2000):
            kernels.search_objective(calc, z, ps.p1, ps.p2, ps.targets, False)


def gradient_calls():
    ps = problems[0]
    for calc, n in enumerate(kernels.N_PARAMS):
        z = np.full(n, 0.3)
        for _ in range(200):
            kernels.search_gradient(calc, z, ps.p1, ps.p2, ps.targets, False, 1e-5)


def tuning():
    for i, (t, ps) in enumerate(zip(tables, problems)):
        for c in CALCULI:
            tune(c, ps, t, TunerConfig(restarts=1), key=i)


tune(CALCULI[2], problems[0], tables[0], TunerConfig(restarts=0, max_iter=2))
out = {"numba": _accel.USING_NUMBA,
       "ipf (all probes)": best(ipf),
       "objective x8000": best(objective_calls),
       "gradient x800": best(gradient_calls),
       "tune (4 calculi, 2 starts)": best(tuning)}
json.dump(out, sys.stdout)
"""


def run(disable, networks, repeat):
    env = dict(os.environ, CALCTUNE_DISABLE_NUMBA="1" if disable else "0")
    res = subprocess.run([sys.executable, "-c", _WORKER, str(networks), str(repeat)],
                         env=env, check=True, capture_output=True, text=True)
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--networks", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    fast = run(False, args.networks, args.repeat)
    plain = run(True, args.networks, args.repeat)
    if not fast.pop("numba"):
        print("numba unavailable: both columns use the numpy path")
    plain.pop("numba")
    print("%-28s %12s %12s %9s" % ("kernel", "numba [s]", "numpy [s]", "speedup"))
    for key in fast:
        print("%-28s %12.4f %12.4f %8.1fx" % (key, fast[key], plain[key], plain[key] / fast[key]))


if __name__ == "__main__":
    main()
