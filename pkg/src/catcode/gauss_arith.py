"""Exact arithmetic in the Gaussian integers Z[i].

Residues modulo a Gaussian integer ``m`` are represented by the remainder of
nearest-integer division, so every residue class has one canonical
representative, and classes are numbered by sorting those representatives.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import BadParameters, InsufficientModuli, NotAModulus

_GAUSS_RE = re.compile(r"^\s*([+-]?\d+)?\s*(?:([+-])\s*(\d*)\s*[ij])?\s*$")


@dataclass(frozen=True, order=True)
class GaussInt:
    re: int
    im: int = 0

    @classmethod
    def parse(cls, text: str) -> "GaussInt":
        """Parse ``"a+bi"``, ``"a-bi"``, ``"a"``, ``"+bi"``, ``"-i"`` and friends."""
        s = text.strip().replace(" ", "")
        if s.endswith(("i", "j")) and not any(c in s[1:] for c in "+-"):
            # pure imaginary such as "3i", "-i"
            coef = s[:-1]
            if coef in ("", "+"):
                return cls(0, 1)
            if coef == "-":
                return cls(0, -1)
            return cls(0, int(coef))
        m = _GAUSS_RE.match(s)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ValueError(f"not a Gaussian integer: {text!r}")
        a = int(m.group(1)) if m.group(1) is not None else 0
        b = 0
        if m.group(2) is not None:
            b = int(m.group(3)) if m.group(3) else 1
            if m.group(2) == "-":
                b = -b
        return cls(a, b)

    def __str__(self) -> str:
        return f"{self.re}{self.im:+d}i"

    def __add__(self, other):
        other = _coerce(other)
        return GaussInt(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return GaussInt(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        o = _coerce(other)
        return GaussInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussInt(-self.re, -self.im)

    def conj(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def is_unit(self) -> bool:
        return gauss_norm(self) == 1


def _coerce(z) -> GaussInt:
    if isinstance(z, GaussInt):
        return z
    if isinstance(z, int):
        return GaussInt(z, 0)
    return NotImplemented


def gauss_norm(z: GaussInt) -> int:
    return z.re * z.re + z.im * z.im


def _round_half_up(num: int, den: int) -> int:
    # floor(num/den + 1/2) for den > 0
    return (2 * num + den) // (2 * den)


def gauss_divmod(z: GaussInt, m: GaussInt) -> tuple[GaussInt, GaussInt]:
    """Euclidean division ``z = q*m + r`` with ``Nm(r) <= Nm(m)/2``.

    ``q`` rounds each coordinate of ``z/m`` to the nearest integer, halves
    going up, so the remainder is a canonical function of the residue class.
    """
    n = gauss_norm(m)
    if n == 0:
        raise ZeroDivisionError("Gaussian division by zero")
    num = z * m.conj()
    q = GaussInt(_round_half_up(num.re, n), _round_half_up(num.im, n))
    return q, z - q * m


def first_quadrant(z: GaussInt) -> GaussInt:
    """The associate of ``z`` with re > 0 and im >= 0 (0 maps to 0)."""
    for _ in range(4):
        if z.re > 0 and z.im >= 0:
            return z
        z = GaussInt(-z.im, z.re)  # multiply by i
    return z


def gauss_gcd(a: GaussInt, b: GaussInt) -> GaussInt:
    if gauss_norm(a) == 0 and gauss_norm(b) == 0:
        raise BadParameters("gcd(0, 0) is undefined")
    while gauss_norm(b):
        a, b = b, gauss_divmod(a, b)[1]
    return first_quadrant(a)


def pairwise_coprime_gauss(moduli: Sequence[GaussInt]) -> bool:
    return all(
        gauss_gcd(a, b).is_unit()
        for i, a in enumerate(moduli)
        for b in moduli[i + 1 :]
    )


@dataclass(frozen=True)
class GaussModulus:
    value: GaussInt
    residues: tuple[GaussInt, ...]
    index_of: dict = field(repr=False, compare=False)

    @property
    def norm(self) -> int:
        return gauss_norm(self.value)

    @cached_property
    def _table(self):
        # dense lookup over the bounding box of canonical remainders
        half = abs(self.value.re) + abs(self.value.im)
        side = 2 * half + 1
        table = np.full((side, side), -1, dtype=np.int64)
        for idx, r in enumerate(self.residues):
            table[r.re + half, r.im + half] = idx
        return half, table

    def indices(self, re: np.ndarray, im: np.ndarray) -> np.ndarray:
        """Vectorised ``residue_index`` over int64 coordinate arrays."""
        a, b = self.value.re, self.value.im
        n = self.norm
        re = np.asarray(re, dtype=np.int64)
        im = np.asarray(im, dtype=np.int64)
        num_re = re * a + im * b
        num_im = im * a - re * b
        q_re = (2 * num_re + n) // (2 * n)
        q_im = (2 * num_im + n) // (2 * n)
        r_re = re - (q_re * a - q_im * b)
        r_im = im - (q_re * b + q_im * a)
        half, table = self._table
        out = table[r_re + half, r_im + half]
        assert (out >= 0).all()
        return out


def build_modulus(p: GaussInt) -> GaussModulus:
    n = gauss_norm(p)
    if n < 2:
        raise NotAModulus(f"{p} is zero or a unit")
    ip = GaussInt(-p.im, p.re)
    corners = [GaussInt(0, 0), p, ip, p + ip]
    lo_re = min(c.re for c in corners)
    hi_re = max(c.re for c in corners)
    lo_im = min(c.im for c in corners)
    hi_im = max(c.im for c in corners)
    reps = set()
    for x in range(lo_re, hi_re + 1):
        for y in range(lo_im, hi_im + 1):
            reps.add(gauss_divmod(GaussInt(x, y), p)[1])
    residues = tuple(sorted(reps))
    if len(residues) != n:
        raise AssertionError(f"residue system of {p} has {len(residues)} != {n} classes")
    return GaussModulus(p, residues, {r: i for i, r in enumerate(residues)})


def residue_index(m: GaussModulus, z: GaussInt) -> int:
    return m.index_of[gauss_divmod(z, m.value)[1]]


@dataclass(frozen=True)
class DiscEmbedding:
    """The first N lattice points ordered by (norm, counterclockwise angle)."""

    n_classes: int
    radius_sq: int
    re: np.ndarray = field(repr=False, compare=False)
    im: np.ndarray = field(repr=False, compare=False)

    @property
    def points(self) -> list[GaussInt]:
        return [GaussInt(int(a), int(b)) for a, b in zip(self.re, self.im)]

    def point(self, x: int) -> GaussInt:
        return GaussInt(int(self.re[x]), int(self.im[x]))


def _lattice_sorted(radius: int):
    """All lattice points in the square of half-width ``radius``, in disc order."""
    coords = np.arange(-radius, radius + 1, dtype=np.int64)
    re, im = np.meshgrid(coords, coords, indexing="ij")
    re, im = re.ravel(), im.ravel()
    norms = re * re + im * im
    angle = np.mod(np.arctan2(im, re), 2 * np.pi)
    order = np.lexsort((angle, norms))
    return re[order], im[order], norms[order]


def build_disc_embedding(n_classes: int) -> DiscEmbedding:
    if n_classes < 1:
        raise BadParameters("n_classes must be >= 1")
    radius = math.isqrt(int(n_classes / math.pi)) + 2
    while True:
        re, im, norms = _lattice_sorted(radius)
        # only points with norm <= radius^2 are complete in the square
        complete = int(np.searchsorted(norms, radius * radius, side="right"))
        if complete >= n_classes:
            break
        radius *= 2
    re, im = re[:n_classes].copy(), im[:n_classes].copy()
    re.flags.writeable = False
    im.flags.writeable = False
    return DiscEmbedding(n_classes, int(norms[n_classes - 1]), re, im)


def gauss_circle_count(radius_sq: int) -> int:
    """Number of lattice points with re^2 + im^2 <= radius_sq."""
    if radius_sq < 0:
        return 0
    r = math.isqrt(radius_sq)
    return sum(2 * math.isqrt(radius_sq - x * x) + 1 for x in range(-r, r + 1))


def select_gauss_moduli(n_classes: int, k: int = 2, epsilon: float = 0.5, count: int = 1) -> list[GaussInt]:
    """Greedy pairwise-coprime moduli with ``|p|`` in ``[(2t)^(1/k), (2t)^(1/(k-eps)))``.

    Candidates are first-quadrant Gaussian integers scanned by norm, then
    angle.  The window is tested on norms: ``Nm^k >= 4 t^2`` exactly and
    ``Nm^(k-eps) < 4 t^2`` in floating point.
    """
    if count < 1:
        raise BadParameters("count must be >= 1")
    if k < 1 or not 0 < epsilon < 1 or k - epsilon <= 0:
        raise BadParameters("need k >= 1 and 0 < epsilon < 1 with k - epsilon > 0")
    four_t2 = 4 * build_disc_embedding(n_classes).radius_sq
    hi = four_t2 ** (1.0 / (k - epsilon)) if four_t2 else 2.0
    # hi bounds the norm from above; scan the quarter plane up to it
    radius = math.isqrt(int(hi)) + 1
    re, im, norms = _lattice_sorted(radius)
    kept: list[GaussInt] = []
    for a, b, n in zip(re.tolist(), im.tolist(), norms.tolist()):
        if not (a > 0 and b >= 0) or n < 2:
            continue
        if n**k < four_t2:
            continue
        if n >= hi:
            break
        cand = GaussInt(a, b)
        if all(gauss_gcd(cand, m).is_unit() for m in kept):
            kept.append(cand)
            if len(kept) == count:
                return kept
    raise InsufficientModuli(f"annulus exhausted after {len(kept)} of {count} moduli")
