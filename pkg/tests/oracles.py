"""Independent reference computations used to freeze and cross-check expected values.

None of these call into the package's numerical code paths.
"""

import itertools
import math

import numpy as np

H = 6.62607015e-34


def osnr_closed_form(n_spans, span_loss_db, launch_dbm, target_dbm, nf_db, freq_hz, bref_hz,
                     location="none", loss_db=0.0, span=0):
    """Receiver OSNR by summing each amplifier's ASE times its end-to-end transfer.

    With fixed in-line gains equal to span losses, the only net attenuation
    between an amplifier output and the receiver is a tap located in a
    downstream span.
    """
    f = 10 ** (nf_db / 10)

    def ase_w(gain_db):
        return max(f * H * freq_hz * bref_hz * (10 ** (gain_db / 10) - 1), 0.0)

    booster_in = launch_dbm - (loss_db if location in ("tx", "prebooster") else 0.0)
    amps = [(0, target_dbm - booster_in)] + [(k, span_loss_db[k - 1]) for k in range(1, n_spans + 1)]
    total = 0.0
    for position, gain in amps:
        # amp at position k feeds spans k+1..n
        downstream_tap = loss_db if location == "span" and span > position else 0.0
        total += ase_w(gain) * 10 ** (-downstream_tap / 10)
    signal_w = 10 ** ((target_dbm - (loss_db if location == "span" else 0.0)) / 10) * 1e-3
    return 10 * math.log10(signal_w / total)


def best_two_partition(points):
    """Exhaustive minimum-SSE split into two non-empty groups."""
    x = np.asarray(points, dtype=float)
    n = len(x)
    best = (math.inf, None)
    for mask in range(1, 2 ** (n - 1)):
        groups = np.array([(mask >> i) & 1 for i in range(n)])
        cost = sum(((x[groups == g] - x[groups == g].mean(axis=0)) ** 2).sum() for g in (0, 1))
        if cost < best[0] - 1e-12:
            best = (cost, groups)
    return best


def brute_matching_rate(assignments, labels):
    """Best one-to-one cluster->label agreement by enumerating injections."""
    clusters = sorted(set(assignments))
    names = sorted(set(labels))
    n = len(labels)
    best = 0
    small, large = (clusters, names) if len(clusters) <= len(names) else (names, clusters)
    for perm in itertools.permutations(large, len(small)):
        pairs = dict(zip(small, perm))
        if len(clusters) <= len(names):
            hit = sum(1 for a, lab in zip(assignments, labels) if pairs[a] == lab)
        else:
            hit = sum(1 for a, lab in zip(assignments, labels) if pairs[lab] == a)
        best = max(best, hit)
    return best / n


def lloyd_restarts(points, k, restarts=100, seed=12345, max_iter=500):
    """Plain Lloyd's k-means from random row seeds; returns (best_sse, best_labels)."""
    x = np.asarray(points, dtype=float)
    rng = np.random.default_rng(seed)
    best = (math.inf, None)
    for _ in range(restarts):
        centers = x[rng.choice(len(x), size=k, replace=False)]
        labels = None
        for _ in range(max_iter):
            d = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new = d.argmin(axis=1)
            if labels is not None and np.array_equal(new, labels):
                break
            labels = new
            centers = np.array([x[labels == j].mean(axis=0) if np.any(labels == j) else centers[j]
                                for j in range(k)])
        if len(set(labels)) < k:
            continue
        cost = sum(((x[labels == j] - x[labels == j].mean(axis=0)) ** 2).sum() for j in range(k))
        if cost < best[0]:
            best = (cost, labels)
    return best


def same_partition(a, b):
    """True when two labelings induce the same partition of the rows."""
    a, b = list(a), list(b)
    fwd, back = {}, {}
    for x, y in zip(a, b):
        if fwd.setdefault(x, y) != y or back.setdefault(y, x) != x:
            return False
    return True
