"""Time the numba kernels against the interpreter/numpy fallbacks.

    python3 benchmarks/bench_backends.py [--bits N] [--repeat R]

Kernel timings run in-process (both forms are always importable). The
end-to-end keystream timing runs in two subprocesses, one with
THRESHCRYPT_DISABLE_JIT=1, because the backend is fixed at import time.
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from threshcrypt import kernels, prng

_KEYSTREAM_PROBE = """
import json, sys, time
import threshcrypt
from threshcrypt.prng import generate_keystream, load_preset
n = int(sys.argv[1])
out = {"backend": threshcrypt.BACKEND}
for name in "AC":
    key = load_preset(name)
    generate_keystream(key, 1024)  # warm-up (JIT compile / cache load)
    t = time.perf_counter()
    generate_keystream(key, n)
    out[name] = time.perf_counter() - t
print(json.dumps(out))
"""


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_rows(n, repeat):
    xs = np.random.default_rng(0).random(n)
    bits = (xs < 0.5).astype(np.uint8)
    tree = prng.relative_tree(0.436, 4)
    cases = [
        ("orbit (logistic)",
         lambda: kernels.orbit_numba(kernels.LOGISTIC, 4.0, 0.2, 0, n),
         lambda: kernels.orbit_loop(kernels.LOGISTIC, 4.0, 0.2, 0, n)),
        ("orbit (one-param)",
         lambda: kernels.orbit_numba(kernels.ONE_PARAM, 0.75, 0.4, 0, n),
         lambda: kernels.orbit_loop(kernels.ONE_PARAM, 0.75, 0.4, 0, n)),
        ("segmentation labels k=4",
         lambda: kernels.segmentation_labels_numba(xs, 0.5, 4),
         lambda: kernels.segmentation_labels_numpy(xs, 0.5, 4)),
        ("tree labels k=4",
         lambda: kernels.tree_labels_numba(xs, tree, 4),
         lambda: kernels.tree_labels_numpy(xs, tree, 4)),
        ("longest runs M=128",
         lambda: kernels.longest_runs_numba(bits, 128),
         lambda: kernels.longest_runs_numpy(bits, 128)),
    ]
    for name, fast, slow in cases:
        fast()  # compile outside the timed region
        yield name, best_of(fast, repeat), best_of(slow, max(1, repeat // 2))


def keystream_times(n, disable):
    env = dict(os.environ)
    env.pop("THRESHCRYPT_DISABLE_JIT", None)
    if disable:
        env["THRESHCRYPT_DISABLE_JIT"] = "1"
    done = subprocess.run([sys.executable, "-c", _KEYSTREAM_PROBE, str(n)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(done.stdout)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--bits", type=int, default=1 << 20, help="orbit / stream length")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    print(f"{'kernel':<26}{'numba s':>12}{'fallback s':>12}{'speedup':>10}")
    for name, fast, slow in kernel_rows(args.bits, args.repeat):
        print(f"{name:<26}{fast:>12.4f}{slow:>12.4f}{slow / fast:>9.1f}x")

    jit, nojit = keystream_times(args.bits, False), keystream_times(args.bits, True)
    for name in "AC":
        label = f"keystream preset {name}"
        print(f"{label:<26}{jit[name]:>12.4f}{nojit[name]:>12.4f}{nojit[name] / jit[name]:>9.1f}x")


if __name__ == "__main__":
    main()
