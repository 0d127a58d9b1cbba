"""External cluster validity indices: Jaccard, Rand, and normalized mutual
information. All three compare two labelings of the same points and are
invariant to relabeling; Jaccard and Rand count agreeing point pairs through
the contingency table, NMI is MI / sqrt(H(a) H(b)) in nats with the
single-cluster convention NMI = 0.
"""

import numpy as np


def _contingency(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValueError(f"labelings must be equal-length 1-D arrays, got {a.shape} and {b.shape}")
    if a.size == 0:
        raise ValueError("labelings must not be empty")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    na, nb = ia.max() + 1, ib.max() + 1
    counts = np.bincount(ia * nb + ib, minlength=na * nb).reshape(na, nb)
    return counts


def _pair_counts(counts: np.ndarray):
    """(n11, n10, n01, n00): pairs together in both / a only / b only / neither."""

    def comb2(v):
        return int((v.astype(np.int64) * (v.astype(np.int64) - 1) // 2).sum())

    n = int(counts.sum())
    together_a = comb2(counts.sum(axis=1))
    together_b = comb2(counts.sum(axis=0))
    n11 = comb2(counts.ravel())
    total = n * (n - 1) // 2
    n10 = together_a - n11
    n01 = together_b - n11
    n00 = total - n11 - n10 - n01
    return n11, n10, n01, n00


def jaccard_index(a, b) -> float:
    """|S11| / (|S11| + |S10| + |S01|) over point pairs; 1.0 when no pair is
    co-clustered in either labeling (two all-singleton partitions agree)."""
    n11, n10, n01, _ = _pair_counts(_contingency(a, b))
    denom = n11 + n10 + n01
    return n11 / denom if denom else 1.0


def rand_index(a, b) -> float:
    """(|S11| + |S00|) / (N choose 2) over point pairs."""
    counts = _contingency(a, b)
    n = int(counts.sum())
    if n < 2:
        return 1.0
    n11, _, _, n00 = _pair_counts(counts)
    return (n11 + n00) / (n * (n - 1) // 2)


def normalized_mutual_information(a, b) -> float:
    """MI(a, b) / sqrt(H(a) H(b)) in nats; 0.0 when either partition has a
    single cluster (zero entropy)."""
    counts = _contingency(a, b).astype(float)
    n = counts.sum()
    pa = counts.sum(axis=1) / n
    pb = counts.sum(axis=0) / n
    ha = float(-(pa * np.log(pa, where=pa > 0, out=np.zeros_like(pa))).sum())
    hb = float(-(pb * np.log(pb, where=pb > 0, out=np.zeros_like(pb))).sum())
    if ha == 0.0 or hb == 0.0:
        return 0.0
    pij = counts / n
    outer = np.outer(pa, pb)
    mask = pij > 0
    mi = float((pij[mask] * np.log(pij[mask] / outer[mask])).sum())
    return mi / np.sqrt(ha * hb)
