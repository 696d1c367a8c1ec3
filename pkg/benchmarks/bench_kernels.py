"""Time the numba kernels against the pure-numpy fallback.

The backend is fixed at import time by CMLOOPS_BACKEND, so the script
re-invokes itself once per backend and compares wall times and result
hashes.  Run from the repository root:

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --quick
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import subprocess
import sys
import time


def _workloads(quick: bool):
    import numpy as np

    from cmloops import (
        DegreeSequence,
        exact_joint_law,
        powerlaw_degrees,
        regular_degrees,
        run_montecarlo,
    )

    reg = DegreeSequence.undirected(regular_degrees(1000, 3))
    pl = DegreeSequence.undirected(powerlaw_degrees(10_000, 2.5, 1.0))
    mc_reps = 2_000 if quick else 20_000
    pl_reps = 50 if quick else 300

    def digest(arr) -> str:
        return hashlib.sha256(np.ascontiguousarray(arr).tobytes()).hexdigest()

    def sample_regular():
        return digest(run_montecarlo(reg, mc_reps, 0).table)

    def sample_powerlaw():
        return digest(run_montecarlo(pl, pl_reps, 0, m_cut=40).table)

    def enum_pairings():
        law = exact_joint_law(DegreeSequence.undirected([2] * 7))
        return json.dumps(sorted(law.joint_counts.items()))

    def enum_bijections():
        law = exact_joint_law(DegreeSequence.directed([2] * 4, [2] * 4))
        return json.dumps(sorted(law.joint_counts.items()))

    return [
        (f"sample 3-regular n=1000 x{mc_reps}", sample_regular),
        (f"sample powerlaw n=10^4 x{pl_reps}", sample_powerlaw),
        ("enumerate 13!! pairings", enum_pairings),
        ("enumerate 8! bijections", enum_bijections),
    ]


def probe(quick: bool) -> None:
    from cmloops import current_backend

    results = {"backend": current_backend(), "times": {}, "digest": {}}
    for name, fn in _workloads(quick):
        fn()  # warm any compilation and page cache
        t0 = time.perf_counter()
        out = fn()
        results["times"][name] = time.perf_counter() - t0
        results["digest"][name] = out
    json.dump(results, sys.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller replicate counts")
    parser.add_argument("--probe", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.probe:
        probe(args.quick)
        return 0

    runs = {}
    for backend in ("numba", "numpy"):
        cmd = [sys.executable, os.path.abspath(__file__), "--probe"]
        if args.quick:
            cmd.append("--quick")
        env = dict(os.environ, CMLOOPS_BACKEND=backend)
        res = subprocess.run(cmd, env=env, capture_output=True, text=True)
        if res.returncode != 0:
            sys.stderr.write(res.stderr)
            return 1
        runs[backend] = json.loads(res.stdout)

    fast, slow = runs["numba"], runs["numpy"]
    width = max(len(name) for name in fast["times"])
    print(f"{'workload':<{width}}  {'numba':>8}  {'numpy':>8}  {'speedup':>7}  agree")
    mismatched = 0
    for name in fast["times"]:
        tn, tp = fast["times"][name], slow["times"][name]
        agree = fast["digest"][name] == slow["digest"][name]
        mismatched += not agree
        print(
            f"{name:<{width}}  {tn:>7.3f}s  {tp:>7.3f}s  {tp / tn:>6.1f}x  "
            f"{'yes' if agree else 'NO'}"
        )
    if mismatched:
        print(f"{mismatched} workload(s) disagree between backends", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
