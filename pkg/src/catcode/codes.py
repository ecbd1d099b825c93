"""Category codes: construction, site encoding, r-hot emission, serialization.

A :class:`Codebook` maps IDs ``0..N-1`` to site tuples ``(f_1(x), ..., f_r(x))``
with ``f_i(x)`` in ``[0, N_i)``.  Six schemes are supported:

* ``polynomial`` -- p-adic digits of ``x`` read as a polynomial over F_p and
  evaluated at distinct points (a Reed-Solomon code).
* ``remainder``  -- ``x mod m_i`` for pairwise coprime moduli.
* ``gauss``      -- ``x`` is placed on a Gaussian integer in a minimal disc and
  reduced modulo pairwise coprime Gaussian moduli.
* ``coo``        -- cut-off one-hot with one shared bucket.
* ``rmp``        -- punctured first-order Reed-Muller code, one binary site per bit.
* ``ecoc``       -- dense binary expansion, one binary site per bit.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import gauss_arith as ga
from .errors import (
    BadParameters,
    ModulusTooSmall,
    NotCoprime,
    OutOfRange,
    Unreachable,
)
from .integer_arith import (
    MAX_CLASSES,
    PrimeSearchWindow,
    is_prime,
    select_primes,
    validate_pairwise_coprime,
)

SCHEMES = ("polynomial", "remainder", "gauss", "coo", "rmp", "ecoc")
FORMAT_VERSION = 1


def rng_for(seed: int, stream: str) -> np.random.Generator:
    """Independent generator for a named stream derived from one seed."""
    return np.random.default_rng([int(seed), zlib.crc32(stream.encode())])


@dataclass(frozen=True)
class SiteTuple:
    values: tuple[int, ...]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class RHotVector:
    total_bits: int
    set_bits: tuple[int, ...]
    block_offsets: tuple[int, ...]

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.total_bits, dtype=np.uint8)
        out[list(self.set_bits)] = 1
        return out

    def to_string(self) -> str:
        return "".join(map(str, self.to_array()))


@dataclass(frozen=True)
class Codebook:
    scheme: str
    n_classes: int
    site_sizes: tuple[int, ...]
    params: dict = field(compare=True)
    anti: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise BadParameters(f"unknown scheme {self.scheme!r}")
        if not 2 <= self.n_classes <= MAX_CLASSES:
            raise BadParameters(f"n_classes must be in [2, 2^40], got {self.n_classes}")
        if not self.site_sizes or any(s < 2 for s in self.site_sizes):
            raise BadParameters(f"every site size must be >= 2, got {self.site_sizes}")

    @property
    def r(self) -> int:
        return len(self.site_sizes)

    @property
    def block_offsets(self) -> tuple[int, ...]:
        return tuple(int(v) for v in np.concatenate([[0], np.cumsum(self.site_sizes)[:-1]]))

    @property
    def total_bits(self) -> int:
        return int(sum(self.site_sizes))

    @property
    def weight(self) -> int:
        """Set bits in every emitted r-hot vector."""
        return self.total_bits - self.r if self.anti else self.r

    @cached_property
    def _gauss_moduli(self) -> list[ga.GaussModulus]:
        return [ga.build_modulus(ga.GaussInt.parse(s)) for s in self.params["moduli"]]

    @cached_property
    def _disc(self) -> ga.DiscEmbedding:
        return ga.build_disc_embedding(self.n_classes)

    @cached_property
    def table(self) -> np.ndarray:
        """Site values of every ID, shape (N, r).  Built lazily, read-only."""
        t = encode_many(self, np.arange(self.n_classes, dtype=np.int64))
        t.flags.writeable = False
        return t

    @cached_property
    def columns(self) -> np.ndarray:
        """``table`` transposed to shape (r, N), contiguous per site."""
        c = np.ascontiguousarray(self.table.T)
        c.flags.writeable = False
        return c


def with_anti(cb: Codebook, anti: bool = True) -> Codebook:
    return Codebook(cb.scheme, cb.n_classes, cb.site_sizes, cb.params, anti)


def _check_n(n_classes: int) -> None:
    if not 2 <= n_classes <= MAX_CLASSES:
        raise BadParameters(f"n_classes must be in [2, 2^40], got {n_classes}")


def _infer_k(n_classes: int, sizes: Sequence[int]) -> int:
    """Smallest i with N <= product of the i smallest sizes."""
    prod = 1
    for i, s in enumerate(sorted(sizes), start=1):
        prod *= s
        if prod >= n_classes:
            return i
    raise ModulusTooSmall(f"product of all site sizes {prod} < N={n_classes}")


def theoretical_min_collision(n_classes: int, site_sizes: Sequence[int]) -> int:
    """Lower bound on the collision number of any code with these site sizes."""
    if not site_sizes:
        raise BadParameters("site_sizes must be nonempty")
    prod = 1
    for i, s in enumerate(sorted(site_sizes), start=1):
        prod *= s
        if n_classes <= prod:
            return i - 1
    raise Unreachable(f"product of site sizes {prod} < N={n_classes}: no injective code")


# --------------------------------------------------------------------------
# builders


def build_polynomial_cc(
    n_classes: int,
    k: int | None = None,
    p: int | None = None,
    r: int = 2,
    eval_points: Sequence[int] | None = None,
    epsilon: float = 0.5,
) -> Codebook:
    _check_n(n_classes)
    if p is None:
        k = 2 if k is None else k
        p = select_primes(PrimeSearchWindow(n_classes, k, epsilon), 1)[0]
    elif not is_prime(p):
        raise BadParameters(f"p={p} is not prime")
    if k is None:
        k = 1
        while p**k < n_classes:
            k += 1
    if n_classes > p**k:
        raise BadParameters(f"N={n_classes} > p^k={p}^{k}: p-adic map is not injective")
    points = list(range(r)) if eval_points is None else [int(v) for v in eval_points]
    r = len(points)
    if r < 1 or r > p:
        raise BadParameters(f"need 1 <= r <= p, got r={r}, p={p}")
    if len(set(points)) != r or any(not 0 <= v < p for v in points):
        raise BadParameters("eval_points must be distinct elements of [0, p)")
    return Codebook(
        "polynomial", n_classes, (p,) * r, {"p": p, "k": k, "eval_points": points}
    )


def build_remainder_cc(
    n_classes: int,
    k: int | None = None,
    moduli: Sequence[int] | None = None,
    r: int = 2,
    epsilon: float = 0.5,
) -> Codebook:
    _check_n(n_classes)
    if moduli is None:
        k = 2 if k is None else k
        moduli = select_primes(PrimeSearchWindow(n_classes, k, epsilon), r)
    moduli = [int(m) for m in moduli]
    if any(m < 2 for m in moduli):
        raise BadParameters("moduli must be >= 2")
    if not validate_pairwise_coprime(moduli):
        raise NotCoprime(f"moduli {moduli} are not pairwise coprime")
    if k is None:
        k = _infer_k(n_classes, moduli)
    if k > len(moduli) or math.prod(sorted(moduli)[:k]) < n_classes:
        raise ModulusTooSmall(f"product of the {k} smallest moduli is below N={n_classes}")
    return Codebook("remainder", n_classes, tuple(moduli), {"moduli": moduli, "k": k})


def build_gauss_cc(
    n_classes: int,
    k: int | None = None,
    moduli: Sequence[ga.GaussInt | str] | None = None,
    r: int = 2,
    epsilon: float = 0.5,
) -> Codebook:
    _check_n(n_classes)
    if moduli is None:
        k = 2 if k is None else k
        moduli = ga.select_gauss_moduli(n_classes, k, epsilon, r)
    moduli = [ga.GaussInt.parse(m) if isinstance(m, str) else m for m in moduli]
    norms = [ga.gauss_norm(m) for m in moduli]
    if any(n < 2 for n in norms):
        raise BadParameters("Gaussian moduli must be nonzero non-units")
    if not ga.pairwise_coprime_gauss(moduli):
        raise NotCoprime(f"moduli {[str(m) for m in moduli]} are not pairwise coprime")
    four_t2 = 4 * ga.build_disc_embedding(n_classes).radius_sq
    if k is None:
        prod, k = 1, 0
        for n in sorted(norms):
            prod *= n
            k += 1
            if prod > four_t2:
                break
    # (prod |p_i|)^2 > (2t)^2 compared exactly on norms
    if k > len(moduli) or math.prod(sorted(norms)[:k]) <= four_t2:
        raise ModulusTooSmall(
            f"product of the {k} smallest |p_i| does not exceed the disc diameter 2t"
        )
    return Codebook(
        "gauss", n_classes, tuple(norms), {"moduli": [str(m) for m in moduli], "k": k}
    )


def build_coo(n_classes: int, total_bits: int, frequency_order: Sequence[int] | None = None) -> Codebook:
    """Cut-off one-hot: the ``n-1`` most frequent IDs get their own bit."""
    _check_n(n_classes)
    if not 2 <= total_bits <= n_classes:
        raise BadParameters(f"need 2 <= bits <= N, got {total_bits}")
    order = None
    if frequency_order is not None:
        order = [int(v) for v in frequency_order]
        if sorted(order) != list(range(n_classes)):
            raise BadParameters("frequency_order must be a permutation of 0..N-1")
        if order == list(range(n_classes)):
            order = None
    return Codebook(
        "coo", n_classes, (total_bits,), {"n_bits": total_bits, "frequency_order": order}
    )


def build_rmp(n_classes: int, m: int, kept_bits: int, seed: int = 0) -> Codebook:
    """Reed-Muller RM(m, 1) with a seeded random puncture down to ``kept_bits``."""
    _check_n(n_classes)
    if m < 1 or 2 ** (m + 1) < n_classes:
        raise BadParameters(f"RM({m},1) has {2 ** (m + 1)} codewords, need {n_classes}")
    length = 2**m
    if not 1 <= kept_bits <= length:
        raise BadParameters(f"kept_bits must be in [1, {length}]")
    rng = rng_for(seed, "rmp-puncture")
    removed = rng.choice(length, size=length - kept_bits, replace=False)
    mask = np.ones(length, dtype=bool)
    mask[removed] = False
    kept = np.flatnonzero(mask).tolist()
    return Codebook(
        "rmp", n_classes, (2,) * kept_bits, {"m": m, "kept": kept, "seed": int(seed)}
    )


def build_ecoc(n_classes: int, bits: int, seed: int | None = None) -> Codebook:
    """Binary ECOC.  Without a seed, ID ``x`` gets its own binary expansion
    (LSB first); with a seed, a random injective assignment of bit patterns."""
    _check_n(n_classes)
    if bits < 1 or 2**bits < n_classes:
        raise BadParameters(f"2^{bits} < N={n_classes}")
    codes = None
    if seed is not None:
        codes = rng_for(seed, "ecoc-codes").permutation(2**bits)[:n_classes].tolist()
    return Codebook("ecoc", n_classes, (2,) * bits, {"bits": bits, "codes": codes})


# --------------------------------------------------------------------------
# encoding


def _as_ids(cb: Codebook, ids) -> np.ndarray:
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= cb.n_classes):
        bad = ids[(ids < 0) | (ids >= cb.n_classes)][0]
        raise OutOfRange(f"ID {int(bad)} outside [0, {cb.n_classes})")
    return ids


def encode_many(cb: Codebook, ids) -> np.ndarray:
    """Site values for an array of IDs, shape ``(len(ids), r)``, int64."""
    ids = _as_ids(cb, ids).reshape(-1)
    prm = cb.params
    if cb.scheme == "remainder":
        return ids[:, None] % np.asarray(prm["moduli"], dtype=np.int64)[None, :]
    if cb.scheme == "polynomial":
        p, k = prm["p"], prm["k"]
        digits = []
        rest = ids.copy()
        for _ in range(k):
            rest, d = np.divmod(rest, p)
            digits.append(d)
        pts = np.asarray(prm["eval_points"], dtype=np.int64)[None, :]
        acc = np.zeros((ids.size, len(prm["eval_points"])), dtype=np.int64)
        for d in reversed(digits):
            acc = (acc * pts + d[:, None]) % p
        return acc
    if cb.scheme == "gauss":
        disc = cb._disc
        re, im = disc.re[ids], disc.im[ids]
        return np.stack([m.indices(re, im) for m in cb._gauss_moduli], axis=1)
    if cb.scheme == "coo":
        n = prm["n_bits"]
        if prm["frequency_order"] is None:
            rank = ids
        else:
            inv = np.empty(cb.n_classes, dtype=np.int64)
            inv[np.asarray(prm["frequency_order"], dtype=np.int64)] = np.arange(cb.n_classes)
            rank = inv[ids]
        return np.minimum(rank, n - 1)[:, None]
    if cb.scheme == "rmp":
        a0 = ids & 1
        a = (ids >> 1)[:, None]
        kept = np.asarray(prm["kept"], dtype=np.int64)[None, :]
        parity = np.bitwise_count(a & kept).astype(np.int64) & 1
        return parity ^ a0[:, None]
    if cb.scheme == "ecoc":
        words = ids if prm["codes"] is None else np.asarray(prm["codes"], dtype=np.int64)[ids]
        shifts = np.arange(prm["bits"], dtype=np.int64)[None, :]
        return (words[:, None] >> shifts) & 1
    raise BadParameters(f"unknown scheme {cb.scheme!r}")  # pragma: no cover


def encode(cb: Codebook, x: int) -> SiteTuple:
    if not 0 <= x < cb.n_classes:
        raise OutOfRange(f"ID {x} outside [0, {cb.n_classes})")
    return SiteTuple(tuple(int(v) for v in encode_many(cb, [x])[0]))


def to_rhot(cb: Codebook, x: int) -> RHotVector:
    sites = encode(cb, x).values
    offsets = cb.block_offsets
    bits = [o + v for o, v in zip(offsets, sites)]
    if cb.anti:
        hot = set(bits)
        bits = [b for b in range(cb.total_bits) if b not in hot]
    return RHotVector(cb.total_bits, tuple(bits), offsets)


def rhot_matrix(cb: Codebook, ids: Iterable[int] | np.ndarray) -> np.ndarray:
    """Dense r-hot rows (anti flag applied) for many IDs, dtype uint8."""
    sites = encode_many(cb, ids)
    out = np.zeros((sites.shape[0], cb.total_bits), dtype=np.uint8)
    cols = sites + np.asarray(cb.block_offsets, dtype=np.int64)[None, :]
    out[np.arange(sites.shape[0])[:, None], cols] = 1
    if cb.anti:
        out ^= 1
    return out


# --------------------------------------------------------------------------
# serialization


def codebook_to_dict(cb: Codebook) -> dict:
    return {
        "version": FORMAT_VERSION,
        "scheme": cb.scheme,
        "n_classes": cb.n_classes,
        "site_sizes": list(cb.site_sizes),
        "params": cb.params,
        "anti": cb.anti,
    }


def dumps(cb: Codebook) -> str:
    return json.dumps(codebook_to_dict(cb), indent=1) + "\n"


def codebook_from_dict(doc: dict) -> Codebook:
    if doc.get("version") != FORMAT_VERSION:
        raise BadParameters(f"unsupported codebook version {doc.get('version')!r}")
    scheme, n, prm = doc["scheme"], int(doc["n_classes"]), doc["params"]
    if scheme == "polynomial":
        cb = build_polynomial_cc(n, k=prm["k"], p=prm["p"], eval_points=prm["eval_points"])
    elif scheme == "remainder":
        cb = build_remainder_cc(n, k=prm["k"], moduli=prm["moduli"])
    elif scheme == "gauss":
        cb = build_gauss_cc(n, k=prm["k"], moduli=prm["moduli"])
    elif scheme == "coo":
        cb = build_coo(n, prm["n_bits"], prm["frequency_order"])
    elif scheme == "rmp":
        # the kept list is authoritative; the seed is informational
        kept = [int(v) for v in prm["kept"]]
        m = int(prm["m"])
        if 2 ** (m + 1) < n or any(not 0 <= v < 2**m for v in kept) or len(set(kept)) != len(kept):
            raise BadParameters("invalid rmp parameters")
        cb = Codebook("rmp", n, (2,) * len(kept), {"m": m, "kept": kept, "seed": prm.get("seed")})
    elif scheme == "ecoc":
        cb = Codebook("ecoc", n, (2,) * int(prm["bits"]), {"bits": int(prm["bits"]), "codes": prm.get("codes")})
        if 2 ** cb.params["bits"] < n:
            raise BadParameters("ecoc bit count too small")
    else:
        raise BadParameters(f"unknown scheme {scheme!r}")
    if list(cb.site_sizes) != list(doc["site_sizes"]):
        raise BadParameters("site_sizes inconsistent with params")
    return with_anti(cb, bool(doc.get("anti", False)))


def loads(text: str) -> Codebook:
    return codebook_from_dict(json.loads(text))


def save(cb: Codebook, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(cb))


def load(path) -> Codebook:
    with open(path) as fh:
        return loads(fh.read())
