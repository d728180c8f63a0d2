#!/usr/bin/env python3
"""Benchmark the compiled inference kernels against the NumPy fallback.

Workloads mirror the two hot paths: single-point evaluation (the annealing
inner loop) and batch evaluation (training). A full counterfactual query is
timed per backend in a subprocess so the import-time selection applies.

Run: python benchmarks/bench_backends.py
"""

import os
import subprocess
import sys
import time

import numpy as np

from countermachine import TrainConfig, init_grid
from countermachine import _kernels_py as knp

try:
    from countermachine import _kernels as cyk
except ImportError:
    cyk = None


def packed_args(model):
    p = model._packed
    return p.centers, p.widths, p.input_of, p.rule_mf, p.coeffs


def time_fn(fn, repeats):
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def bench_kernels():
    rng = np.random.default_rng(0)
    model = init_grid(7, tuple(f"f{i}" for i in range(7)), TrainConfig(mfs_per_input=2))
    args = packed_args(model)
    x = np.ascontiguousarray(rng.uniform(0, 1, 7))
    X = np.ascontiguousarray(rng.uniform(0, 1, (1000, 7)))

    rows = []
    point_repeats = 20_000
    batch_repeats = 50
    obj_py = knp.SquaredErrorObjective(*args, 0.0)
    t_py_point = time_fn(lambda: knp.eval_point(*args, x), point_repeats)
    t_py_obj = time_fn(lambda: obj_py(x), point_repeats)
    t_py_batch = time_fn(lambda: knp.eval_batch(*args, X), batch_repeats)
    rows.append(("python", t_py_point, t_py_obj, t_py_batch))
    if cyk is not None:
        obj_cy = cyk.SquaredErrorObjective(*args, 0.0)
        t_cy_point = time_fn(lambda: cyk.eval_point(*args, x), point_repeats)
        t_cy_obj = time_fn(lambda: obj_cy(x), point_repeats)
        t_cy_batch = time_fn(lambda: cyk.eval_batch(*args, X), batch_repeats)
        rows.append(("cython", t_cy_point, t_cy_obj, t_cy_batch))
        y_p, _ = knp.eval_point(*args, x)
        y_c, _ = cyk.eval_point(*args, x)
        assert abs(y_p - y_c) <= 1e-12 * max(1.0, abs(y_p)), "backends disagree"
        assert abs(obj_py(x) - obj_cy(x)) <= 1e-12, "objectives disagree"

    print(
        f"{'backend':<8} {'eval_point':>14} {'sa objective':>14} {'eval_batch 1000x':>18}",
        flush=True,
    )
    for name, tp, to, tb in rows:
        print(
            f"{name:<8} {tp * 1e6:>11.2f} us {to * 1e6:>11.2f} us {tb * 1e3:>15.2f} ms",
            flush=True,
        )
    if cyk is not None:
        print(
            f"speedup  {t_py_point / t_cy_point:>11.1f} x  {t_py_obj / t_cy_obj:>11.1f} x "
            f"{t_py_batch / t_cy_batch:>15.1f} x",
            flush=True,
        )


CF_SNIPPET = """
import time
import countermachine as cm

records = cm.generate_synthetic(2000, seed=7)
ds = cm.normalize(records)
train, test = cm.split_balanced(ds, 500, 392, seed=7)
model, _ = cm.fit(train, test, cm.TrainConfig())
factual = (0.0, 1.0, 0.4, 0.1, 0.3, 0.1, 0.6)
free = tuple(n in ("distance", "allies", "capability") for n in cm.FEATURE_NAMES)
query = cm.CounterfactualQuery(factual, 0.0, free, anneal=cm.AnnealConfig(seed=7))
start = time.perf_counter()
res = cm.find_counterfactual(model, query)
elapsed = time.perf_counter() - start
print(f"{cm.backend_name():<8} counterfactual query: {elapsed:.2f} s "
      f"({res.trace.n_evaluations} evaluations, success={res.success})")
"""


def bench_counterfactual():
    backends = ["python"] + (["cython"] if cyk is not None else [])
    for backend in backends:
        env = dict(os.environ, COUNTERMACHINE_BACKEND=backend)
        subprocess.run([sys.executable, "-c", CF_SNIPPET], env=env, check=True)


if __name__ == "__main__":
    bench_kernels()
    print()
    bench_counterfactual()
