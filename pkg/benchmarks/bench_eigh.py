"""Time the batched Jacobi eigensolver under numba and pure numpy.

Each backend runs in its own interpreter because the choice is made at
import time from ENTOBS_DISABLE_NUMBA. numpy.linalg.eigh is timed alongside
as a reference.

    python3 benchmarks/bench_eigh.py --n 10000 --repeat 5
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
from entobs import backend
from entobs.linalg import eigh_batch

n, repeat, seed = map(int, sys.argv[1:4])
rng = np.random.default_rng(seed)
a = rng.normal(size=(n, 4, 4)) + 1j * rng.normal(size=(n, 4, 4))
h = 0.5 * (a + np.conj(np.swapaxes(a, 1, 2)))
eigh_batch(h[:8])  # warm-up (numba compiles or loads its cache here)
t = min(timeit.repeat(lambda: eigh_batch(h), number=1, repeat=repeat))
ref = min(timeit.repeat(lambda: np.linalg.eigh(h), number=1, repeat=repeat))
w, v = eigh_batch(h)
resid = np.max(np.abs(h @ v - v * w[:, None, :]))
print(json.dumps({"backend": backend(), "seconds": t, "lapack_seconds": ref, "residual": float(resid)}))
"""


def run(n: int, repeat: int, seed: int, disable: bool) -> dict:
    env = dict(os.environ)
    env["ENTOBS_DISABLE_NUMBA"] = "1" if disable else "0"
    out = subprocess.run([sys.executable, "-c", WORKER, str(n), str(repeat), str(seed)],
                         env=env, check=True, capture_output=True, text=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=10_000, help="number of 4x4 matrices")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    results = [run(args.n, args.repeat, args.seed, disable) for disable in (False, True)]
    print(f"{args.n} random Hermitian 4x4 matrices, best of {args.repeat}")
    print(f"{'backend':<8} {'seconds':>10} {'per matrix':>12} {'max residual':>13}")
    for r in results:
        print(f"{r['backend']:<8} {r['seconds']:>10.4f} {r['seconds'] / args.n * 1e6:>10.2f}us "
              f"{r['residual']:>13.2e}")
    ref = results[0]["lapack_seconds"]
    print(f"{'lapack':<8} {ref:>10.4f} {ref / args.n * 1e6:>10.2f}us {'(np.linalg.eigh)':>13}")
    if results[0]["backend"] == "numba":
        print(f"numba speed-up over numpy fallback: {results[1]['seconds'] / results[0]['seconds']:.1f}x")


if __name__ == "__main__":
    main()
