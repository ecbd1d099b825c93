"""Code analysis: collision number, mutual information between sites, AMKL, Hamming."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, asdict
from fractions import Fraction
from typing import Sequence

import numpy as np

from .codes import (
    Codebook,
    RHotVector,
    encode_many,
    rhot_matrix,
    rng_for,
    theoretical_min_collision,
)
from .errors import BadParameters, CapExceeded, ShapeMismatch, Unreachable

COLLISION_CAP = 30_000
MI_CAP = 10_000_000
AMKL_BRUTE_CAP = 10_000


def n_threads() -> int:
    env = os.environ.get("CC_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class CollisionReport:
    max_collisions: int
    theoretical_bound: int | None
    witness_pair: tuple[int, int] | None
    mode: str
    samples: int | None = None
    seed: int | None = None

    @property
    def is_minimal(self) -> bool:
        return self.mode == "exhaustive" and self.max_collisions == self.theoretical_bound

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witness_pair"] = list(self.witness_pair) if self.witness_pair else None
        return d


@dataclass(frozen=True)
class ExtendedKL:
    """KL divergence written as ``infinite_coefficient * log(inf) + finite_part``."""

    infinite_coefficient: Fraction
    finite_part: float = 0.0


# --------------------------------------------------------------------------
# pairwise agreement


def _agreement_bucket(table: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row max agreement with any other row, via per-site value buckets."""
    n, r = table.shape
    orders, starts = [], []
    for i in range(r):
        col = table[:, i]
        order = np.argsort(col, kind="stable")
        sorted_vals = col[order]
        bounds = np.flatnonzero(np.diff(sorted_vals)) + 1
        # start/stop of the bucket containing each row
        edges = np.concatenate([[0], bounds, [n]])
        bucket_of_sorted = np.repeat(np.arange(len(edges) - 1), np.diff(edges))
        bucket = np.empty(n, dtype=np.int64)
        bucket[order] = bucket_of_sorted
        orders.append(order)
        starts.append((edges, bucket))
    tau = np.zeros(n, dtype=np.int64)
    partner = np.full(n, -1, dtype=np.int64)
    for x in range(n):
        parts = []
        for i in range(r):
            edges, bucket = starts[i]
            b = bucket[x]
            if edges[b + 1] - edges[b] > 1:
                parts.append(orders[i][edges[b] : edges[b + 1]])
        if not parts:
            continue
        ids, counts = np.unique(np.concatenate(parts), return_counts=True)
        counts[ids == x] = 0
        j = int(np.argmax(counts))
        if counts[j] > 0:
            tau[x] = counts[j]
            partner[x] = ids[j]
    return tau, partner


def _agreement_matmul(bits: np.ndarray, block: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Per-row max count of common set bits with any other row (dense matmul)."""
    n, b = bits.shape
    mat = bits.astype(np.float32)
    if block is None:
        block = max(1, min(n, (64 << 20) // (4 * max(n, 1))))
    tau = np.zeros(n, dtype=np.int64)
    partner = np.full(n, -1, dtype=np.int64)
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        common = mat[lo:hi] @ mat.T
        common[np.arange(hi - lo), np.arange(lo, hi)] = -1.0
        j = np.argmax(common, axis=1)
        tau[lo:hi] = common[np.arange(hi - lo), j].astype(np.int64)
        partner[lo:hi] = j
    partner[tau == 0] = -1
    return tau, partner


def _one_hot_sites(table: np.ndarray, sizes: Sequence[int]) -> np.ndarray:
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
    out = np.zeros((table.shape[0], int(sum(sizes))), dtype=np.uint8)
    out[np.arange(table.shape[0])[:, None], table + offsets[None, :]] = 1
    return out


def max_agreement(table: np.ndarray, sizes: Sequence[int], method: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """For every row, the largest number of sites it shares with another row.

    Returns ``(tau, partner)``; ``partner[x]`` achieves ``tau[x]`` (-1 if no
    row shares any site).  ``method`` is ``"bucket"``, ``"matmul"`` or
    ``"auto"`` (cheaper by a rough cost model).
    """
    n, r = table.shape
    if method == "auto":
        bucket_cost = 0
        for i in range(r):
            cnt = np.bincount(table[:, i])
            bucket_cost += int((cnt.astype(np.int64) ** 2).sum())
        est_bucket = n * r * 4e-6 + bucket_cost * 2e-8
        est_matmul = n * n * float(sum(sizes)) * 4e-11
        method = "bucket" if est_bucket <= est_matmul else "matmul"
    if method == "bucket":
        return _agreement_bucket(table)
    if method == "matmul":
        return _agreement_matmul(_one_hot_sites(table, sizes))
    raise BadParameters(f"unknown method {method!r}")


# --------------------------------------------------------------------------
# collision number


def collision_number(
    cb: Codebook,
    mode: str = "exhaustive",
    samples: int = 1_000_000,
    seed: int = 0,
    cap: int = COLLISION_CAP,
    domain: Sequence[int] | None = None,
    method: str = "auto",
) -> CollisionReport:
    """``max_{x != y} #{i : f_i(x) = f_i(y)}``.

    ``mode="exhaustive"`` scans every pair (gated by ``cap`` on N);
    ``mode="sampled"`` draws ``samples`` seeded pairs and reports a lower
    bound.  ``domain`` restricts the ID set (e.g. the one-hot head of a COO
    code).
    """
    ids = np.arange(cb.n_classes, dtype=np.int64) if domain is None else np.asarray(domain, dtype=np.int64)
    n = ids.size
    if n < 2:
        raise BadParameters("need at least two IDs")
    try:
        bound = theoretical_min_collision(n, cb.site_sizes)
    except Unreachable:
        bound = None
    if mode == "exhaustive":
        if n > cap:
            raise CapExceeded(f"exhaustive collision scan capped at N={cap}, got {n}")
        table = cb.table[ids] if domain is not None else cb.table
        tau, partner = max_agreement(table, cb.site_sizes, method)
        x = int(np.argmax(tau))
        witness = (int(ids[x]), int(ids[partner[x]])) if partner[x] >= 0 else None
        if witness and witness[0] > witness[1]:
            witness = witness[::-1]
        return CollisionReport(int(tau[x]), bound, witness, "exhaustive")
    if mode == "sampled":
        rng = rng_for(seed, "collision-pairs")
        best, witness = -1, None
        chunk = 1 << 20
        done = 0
        while done < samples:
            m = min(chunk, samples - done)
            a = rng.integers(0, n, m)
            b = (a + rng.integers(1, n, m)) % n  # b != a, uniform over the rest
            agree = (encode_many(cb, ids[a]) == encode_many(cb, ids[b])).sum(axis=1)
            j = int(np.argmax(agree))
            if agree[j] > best:
                best = int(agree[j])
                witness = tuple(sorted((int(ids[a[j]]), int(ids[b[j]]))))
            done += m
        return CollisionReport(best, bound, witness, "sampled", samples, seed)
    raise BadParameters(f"unknown mode {mode!r}")


# --------------------------------------------------------------------------
# mutual information


def mutual_information(cb: Codebook, site_i: int, site_j: int, cap: int = MI_CAP) -> float:
    """Exact I(Y_i; Y_j) in nats for X uniform on [0, N)."""
    if site_i == site_j:
        raise BadParameters("sites must differ")
    if not (0 <= site_i < cb.r and 0 <= site_j < cb.r):
        raise BadParameters(f"site index out of range for r={cb.r}")
    n = cb.n_classes
    if n > cap:
        raise CapExceeded(f"exact MI capped at N={cap}, got {n}")
    cols = encode_many(cb, np.arange(n, dtype=np.int64))
    return _mi_from_columns(cols[:, site_i], cols[:, site_j], cb.site_sizes[site_i], cb.site_sizes[site_j])


def _mi_from_columns(a: np.ndarray, b: np.ndarray, na: int, nb: int) -> float:
    n = a.size
    joint = np.bincount(a * nb + b, minlength=na * nb).reshape(na, nb)
    ca = joint.sum(axis=1)
    cb_ = joint.sum(axis=0)
    ia, ib = np.nonzero(joint)
    c = joint[ia, ib].astype(np.int64)
    # integer ratio c*N / (a*b) then one log per cell
    ratio = (c * n) / (ca[ia].astype(np.int64) * cb_[ib].astype(np.int64))
    terms = (c / n) * np.log(ratio)
    return max(0.0, math.fsum(terms.tolist()))


def site_self_information(cb: Codebook, site: int) -> float:
    """Entropy of a single site in nats (= I(Y_i; Y_i))."""
    col = encode_many(cb, np.arange(cb.n_classes))[:, site]
    cnt = np.bincount(col)
    p = cnt[cnt > 0] / cb.n_classes
    return float(-(p * np.log(p)).sum())


# --------------------------------------------------------------------------
# AMKL


def reduced_kl(c_i: RHotVector, c_j: RHotVector) -> ExtendedKL:
    """KL(dist(c_i) || dist(c_j)) between reduced (uniform-on-support) distributions."""
    if c_i.total_bits != c_j.total_bits:
        raise ShapeMismatch(f"bit lengths differ: {c_i.total_bits} vs {c_j.total_bits}")
    w = len(c_i.set_bits)
    if w != len(c_j.set_bits) or w == 0:
        raise ShapeMismatch("vectors must have the same nonzero number of set bits")
    miss = len(set(c_i.set_bits) - set(c_j.set_bits))
    return ExtendedKL(Fraction(miss, w), 0.0)


def _weights(n: int, weights) -> list[Fraction] | None:
    if weights is None:
        return None
    if len(weights) != n:
        raise ShapeMismatch(f"weights has length {len(weights)}, expected {n}")
    w = [Fraction(v) if not isinstance(v, float) else Fraction(v).limit_denominator(10**12) for v in weights]
    if any(v < 0 for v in w):
        raise BadParameters("weights must be non-negative")
    total = sum(w)
    if abs(float(total) - 1.0) > 1e-9:
        raise BadParameters(f"weights sum to {float(total)}, not 1")
    return [v / total for v in w]


def _weighted_coefficient(miss: np.ndarray, weight: int, weights) -> Fraction:
    n = miss.size
    w = _weights(n, weights)
    if w is None:
        return Fraction(int(miss.sum()), n * weight)
    return sum((p * int(m) for p, m in zip(w, miss.tolist())), Fraction(0)) / weight


def amkl_coefficient(
    cb: Codebook,
    weights: Sequence | None = None,
    method: str = "lemma",
    cap: int = COLLISION_CAP,
) -> Fraction:
    """Average minimal KL divergence, as the exact coefficient of log(inf).

    ``method="lemma"`` finds, for each ID, the largest number ``tau`` of
    sites it shares with another ID and returns ``sum_x p_x (r - tau_x) / w``
    where ``w`` is the codeword weight.  ``method="bruteforce"`` scans every
    pair of r-hot bit vectors directly and is capped at N = 10^4.
    """
    n = cb.n_classes
    if method == "lemma":
        if n > cap:
            raise CapExceeded(f"AMKL capped at N={cap}, got {n}")
        tau, _ = max_agreement(cb.table, cb.site_sizes)
        miss = cb.r - tau
        return _weighted_coefficient(miss, cb.weight, weights)
    if method == "bruteforce":
        if n > min(cap, AMKL_BRUTE_CAP):
            raise CapExceeded(f"brute-force AMKL capped at N={AMKL_BRUTE_CAP}, got {n}")
        bits = rhot_matrix(cb, np.arange(n))
        w = bits.sum(axis=1)
        if (w != w[0]).any():
            raise ShapeMismatch("codewords do not share one weight")
        common, _ = _agreement_matmul(bits)
        miss = w - common
        return _weighted_coefficient(miss, int(w[0]), weights)
    raise BadParameters(f"unknown method {method!r}")


# --------------------------------------------------------------------------
# Hamming


@dataclass(frozen=True)
class HammingStats:
    min: int
    mean: float
    max: int


def sample_pairs(n: int, samples: int, seed: int) -> np.ndarray:
    """``samples`` seeded pairs of distinct IDs, shape (samples, 2)."""
    rng = rng_for(seed, "hamming-pairs")
    a = rng.integers(0, n, samples)
    b = (a + rng.integers(1, n, samples)) % n
    return np.stack([a, b], axis=1)


def pair_hamming(cb: Codebook, pairs: np.ndarray, chunk: int = 8192) -> np.ndarray:
    """Hamming distances between r-hot vectors of the given ID pairs."""
    out = np.empty(len(pairs), dtype=np.int64)
    for lo in range(0, len(pairs), chunk):
        p = pairs[lo : lo + chunk]
        out[lo : lo + len(p)] = (rhot_matrix(cb, p[:, 0]) != rhot_matrix(cb, p[:, 1])).sum(axis=1)
    return out


def hamming_stats(cb: Codebook, sample: int = 10_000, seed: int = 0) -> HammingStats:
    if sample < 2:
        raise BadParameters("sample must be >= 2")
    d = pair_hamming(cb, sample_pairs(cb.n_classes, sample, seed))
    return HammingStats(int(d.min()), float(d.mean()), int(d.max()))


# --------------------------------------------------------------------------
# report


def metrics_report(
    cb: Codebook,
    collision: str | None = "exhaustive",
    samples: int = 1_000_000,
    mi_pairs: Sequence[tuple[int, int]] = (),
    amkl: bool = False,
    hamming: int | None = None,
    seed: int = 0,
    cap: int = COLLISION_CAP,
) -> dict:
    report: dict = {}
    if collision:
        report["collision"] = collision_number(cb, collision, samples, seed, cap).to_dict()
    if mi_pairs:
        report["mi_pairs"] = [
            {"i": i, "j": j, "nats": mutual_information(cb, i, j)} for i, j in mi_pairs
        ]
    if amkl:
        coef = amkl_coefficient(cb, cap=cap)
        report["amkl"] = {"rational": str(coef), "value": float(coef)}
    if hamming:
        h = hamming_stats(cb, hamming, seed)
        report["hamming"] = {"min": h.min, "mean": h.mean, "max": h.max, "samples": hamming, "seed": seed}
    return report
