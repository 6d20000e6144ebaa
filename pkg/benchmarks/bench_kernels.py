"""Compiled vs fallback kernels on world enumeration and full checker runs.

    python benchmarks/bench_kernels.py [--repeat N]

Kernel timings call both backends directly on the same arrays.  The
end-to-end timings run the checkers in a child process, once normally and
once with CAUDIT_PURE_PYTHON=1, so caches and backend selection start cold.
"""

import argparse
import json
import os
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np

from caudit import kernels
from caudit.harness import GenConfig, SplitMix64, background_atoms, generate_frame, random_formula
from caudit.inference import world_table
from caudit.mechlib import database_release
from caudit.prop import compile_prop, eq


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def models():
    yield "db_identity_4", database_release(4, Fraction(1, 4), "identity")
    yield "db_sum_4_removed", database_release(4, Fraction(1, 3), "sum", "removed")
    yield "generated_4x4", generate_frame(GenConfig(seed=1, domain_size_range=(4, 4), num_other_inputs=(2, 2),
                                                    randomized=True, max_denominator=12))


def kernel_rows(repeat):
    backends = kernels.available_backends()
    rows = []
    for name, f in models():
        pm = f.pm
        m = pm.model
        base = world_table(pm)
        nbg = len(m.background)
        rng = SplitMix64(3)
        atoms = background_atoms(f) if hasattr(f, "sensitive_bg") else [eq(d, "1") for d in f.rows_bg]
        atoms += [eq(f.output, o) for o in f.outputs]
        codes = [compile_prop(random_formula(rng, atoms, 3), m)[0] for _ in range(20)]
        cols = np.asarray([m.columns[f.output]], dtype=np.int64)
        radices = np.asarray([1], dtype=np.int64)
        size = len(m.domain(f.output))
        ones = np.ones(len(base.worlds), dtype=np.uint8)
        for label, k in backends.items():
            w = base.worlds.copy()

            def enum():
                w[:, nbg:] = 0
                k.evaluate_worlds(w, *m.program)

            def props():
                for c in codes:
                    mask = k.eval_prop(w, c)
                    k.masked_sum(base.weights, mask)

            def hist():
                for _ in range(20):
                    k.joint_histogram(w, cols, radices, base.weights, ones, size)

            rows.append({"model": name, "worlds": len(base.worlds), "backend": label,
                         "enumerate_s": _time(enum, repeat), "props20_s": _time(props, repeat),
                         "hist20_s": _time(hist, repeat)})
    return rows


END_TO_END = """
import time, json
from fractions import Fraction
from caudit import kernels
from caudit.checkers import check_differential_privacy, check_causal_irrelevance, check_assoc_independence
from caudit.harness import default_grid, run_campaign
from caudit.mechlib import database_release
t0 = time.perf_counter()
check_differential_privacy(database_release(4, Fraction(1, 4), "identity"))
f = database_release(4, Fraction(1, 4), "sum").row_frame(0)
check_causal_irrelevance(f); check_assoc_independence(f)
t1 = time.perf_counter()
run_campaign(default_grid(5), 20)
t2 = time.perf_counter()
print(json.dumps({"backend": kernels.BACKEND, "checkers_s": t1 - t0, "campaign120_s": t2 - t1}))
"""


def end_to_end():
    out = []
    for pure in ("0", "1"):
        env = dict(os.environ, CAUDIT_PURE_PYTHON=pure)
        res = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
        out.append(json.loads(res.stdout))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    rows = kernel_rows(args.repeat)
    e2e = end_to_end()
    if args.json:
        print(json.dumps({"kernels": rows, "end_to_end": e2e}, indent=2))
        return
    if "cython" not in kernels.available_backends():
        print("compiled extension not built; only the fallback is timed")
    print(f"{'model':18s} {'worlds':>7s} {'backend':8s} {'enumerate':>10s} {'20 props':>10s} {'20 hists':>10s}")
    for r in rows:
        print(f"{r['model']:18s} {r['worlds']:7d} {r['backend']:8s} {r['enumerate_s'] * 1e3:8.3f}ms "
              f"{r['props20_s'] * 1e3:8.3f}ms {r['hist20_s'] * 1e3:8.3f}ms")
    print()
    print(f"{'backend':8s} {'checkers':>10s} {'campaign(120)':>14s}")
    for r in e2e:
        print(f"{r['backend']:8s} {r['checkers_s']:9.3f}s {r['campaign120_s']:13.3f}s")


if __name__ == "__main__":
    main()
