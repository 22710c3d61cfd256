"""Hot inner loops: orbit iteration, bit labelling and run-length scans.

Every kernel exists twice. The loop form below is compiled with numba
when the JIT backend is active; the fallback is either the same loop run
by the interpreter (orbits are a sequential recurrence, numpy cannot
vectorise them) or a vectorised numpy rewrite. Both forms perform the
same IEEE-754 operations in the same order, so they agree bit for bit.
"""

import numpy as np

from ._backend import USE_NUMBA, njit

LOGISTIC = 0
ONE_PARAM = 1

# |x - 1/2| below this sends the one-parameter family to 0 and then to
# its fixed point at 1.
CENTER_GUARD = 1e-12


def orbit_loop(kind, param, x, n_skip, n_keep):
    """Iterate a map ``n_skip + n_keep`` times, keeping the last ``n_keep`` states.

    Returns ``(values, final_state, fail_step)``. ``fail_step`` is -1 on
    success, otherwise the 0-based index of the step that would have left
    the open interval (0, 1); ``values`` is then only filled up to it.
    """
    out = np.empty(n_keep, dtype=np.float64)
    total = n_skip + n_keep
    for i in range(total):
        if kind == LOGISTIC:
            x = param * x * (1.0 - x)
        else:
            if abs(x - 0.5) < CENTER_GUARD:
                return out, x, i
            d = 2.0 * x - 1.0
            t = param * param * (d * d)
            x = t / (4.0 * x * (1.0 - x) + t)
        if not (0.0 < x < 1.0):
            return out, x, i
        if i >= n_skip:
            out[i - n_skip] = x
    return out, x, -1


def segmentation_labels_loop(xs, c, k):
    scale = 2.0 ** (k - 1)
    out = np.empty(xs.size, dtype=np.uint8)
    for i in range(xs.size):
        v = xs[i] * scale
        if v - np.floor(v) <= c:
            out[i] = 0
        else:
            out[i] = 1
    return out


def segmentation_labels_numpy(xs, c, k):
    v = xs * (2.0 ** (k - 1))
    return ((v - np.floor(v)) > c).astype(np.uint8)


def tree_labels_loop(xs, splits, depth):
    """Label values against a breadth-first split tree of ``depth`` levels.

    Node ``i`` has children ``2i+1`` (values <= split) and ``2i+2``.
    """
    out = np.empty(xs.size, dtype=np.uint8)
    for i in range(xs.size):
        x = xs[i]
        node = 0
        for _ in range(depth - 1):
            if x <= splits[node]:
                node = 2 * node + 1
            else:
                node = 2 * node + 2
        if x <= splits[node]:
            out[i] = 0
        else:
            out[i] = 1
    return out


def tree_labels_numpy(xs, splits, depth):
    node = np.zeros(xs.size, dtype=np.int64)
    for _ in range(depth - 1):
        node = 2 * node + 1 + (xs > splits[node])
    return (xs > splits[node]).astype(np.uint8)


def longest_runs_loop(bits, block):
    """Longest run of ones in each consecutive block of ``block`` bits."""
    n_blocks = bits.size // block
    out = np.zeros(n_blocks, dtype=np.int64)
    for b in range(n_blocks):
        best = 0
        run = 0
        for j in range(b * block, (b + 1) * block):
            if bits[j]:
                run += 1
                if run > best:
                    best = run
            else:
                run = 0
        out[b] = best
    return out


def longest_runs_numpy(bits, block):
    n_blocks = bits.size // block
    rows = np.zeros((n_blocks, block + 2), dtype=np.int8)
    rows[:, 1:-1] = bits[: n_blocks * block].reshape(n_blocks, block)
    edges = np.diff(rows.ravel())
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    out = np.zeros(n_blocks, dtype=np.int64)
    np.maximum.at(out, starts // (block + 2), ends - starts)
    return out


orbit_numba = njit(orbit_loop)
segmentation_labels_numba = njit(segmentation_labels_loop)
tree_labels_numba = njit(tree_labels_loop)
longest_runs_numba = njit(longest_runs_loop)

if USE_NUMBA:
    orbit = orbit_numba
    segmentation_labels = segmentation_labels_numba
    tree_labels = tree_labels_numba
    longest_runs = longest_runs_numba
else:
    orbit = orbit_loop
    segmentation_labels = segmentation_labels_numpy
    tree_labels = tree_labels_numpy
    longest_runs = longest_runs_numpy
