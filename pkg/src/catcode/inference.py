"""Soft decoding of base-learner outputs and a simulated-ensemble harness."""

from __future__ import annotations

import json
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .codes import Codebook, encode, encode_many
from .errors import BadParameters, OutOfRange, ShapeMismatch
from .metrics import n_threads

PROB_FLOOR = 1e-12
_LEARNER_STREAM = zlib.crc32(b"learners")
_TRIAL_STREAM = zlib.crc32(b"trials")


@dataclass(frozen=True)
class EnsembleOutput:
    """One probability vector per site, aligned with the codebook's sites."""

    dists: tuple[np.ndarray, ...]

    @classmethod
    def from_lists(cls, dists: Sequence[Sequence[float]], tol: float = 1e-9) -> "EnsembleOutput":
        arrs = []
        for i, d in enumerate(dists):
            a = np.asarray(d, dtype=np.float64)
            if a.ndim != 1 or (a < 0).any() or abs(a.sum() - 1.0) > tol:
                raise ShapeMismatch(f"site {i}: not a probability vector")
            a.flags.writeable = False
            arrs.append(a)
        return cls(tuple(arrs))

    def check(self, cb: Codebook) -> None:
        if len(self.dists) != cb.r:
            raise ShapeMismatch(f"{len(self.dists)} distributions for {cb.r} sites")
        for i, (d, n) in enumerate(zip(self.dists, cb.site_sizes)):
            if d.shape != (n,):
                raise ShapeMismatch(f"site {i}: length {d.shape[0]} != site size {n}")

    def to_json(self) -> dict:
        return {"dists": [d.tolist() for d in self.dists]}

    @classmethod
    def from_json(cls, doc: dict) -> "EnsembleOutput":
        return cls.from_lists(doc["dists"])


def scores(cb: Codebook, out: EnsembleOutput, floor: float = PROB_FLOOR) -> np.ndarray:
    """``sum_i log max(P_i(f_i(x)), floor)`` for every label x."""
    out.check(cb)
    cols = cb.columns
    total = np.zeros(cb.n_classes, dtype=np.float64)
    for i, d in enumerate(out.dists):
        total += np.log(np.maximum(d, floor))[cols[i]]
    return total


def decode(cb: Codebook, out: EnsembleOutput, floor: float = PROB_FLOOR) -> int:
    """The smallest label maximising the summed site log-probabilities."""
    return int(np.argmax(scores(cb, out, floor)))


def _kl(q: np.ndarray, p: np.ndarray) -> float:
    mask = q > 0
    with np.errstate(divide="ignore"):
        return float(np.sum(q[mask] * (np.log(q[mask]) - np.log(p[mask]))))


def decode_kl_view(cb: Codebook, out: EnsembleOutput, x: int, floor: float = PROB_FLOOR) -> float:
    """Score of label ``x``; checks it equals ``-sum_i KL(delta_{f_i(x)} || P_i)``.

    The identity is only asserted when no site probability falls below the floor.
    """
    if not 0 <= x < cb.n_classes:
        raise OutOfRange(f"ID {x} outside [0, {cb.n_classes})")
    out.check(cb)
    sites = encode(cb, x).values
    picked = [float(d[v]) for d, v in zip(out.dists, sites)]
    score = math.fsum(math.log(max(p, floor)) for p in picked)
    if min(picked) >= floor:
        kl = 0.0
        for d, v, n in zip(out.dists, sites, cb.site_sizes):
            delta = np.zeros(n)
            delta[v] = 1.0
            kl += _kl(delta, d)
        assert abs(score + kl) <= 1e-9 * max(1.0, abs(score)), (score, kl)
    return score


@dataclass(frozen=True)
class NoiseModel:
    """Stand-in for trained base learners.

    ``symmetric``: each learner predicts the true site value with
    probability ``1 - eta`` and otherwise a uniformly random wrong value;
    it then reports ``1 - eta`` on its prediction and ``eta/(N_i - 1)``
    on every other value.  ``dirichlet``: a ``Dirichlet(alpha)`` draw whose
    largest entry is swapped onto the true value.  ``delta``: exact one-hot.
    """

    kind: str = "delta"
    eta: float = 0.0
    alpha: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("symmetric", "dirichlet", "delta"):
            raise BadParameters(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise BadParameters("eta must be in [0, 1]")
        if self.alpha <= 0:
            raise BadParameters("alpha must be positive")


def simulate_base_learners(
    cb: Codebook, true_label: int, noise: NoiseModel, rng: np.random.Generator | None = None
) -> EnsembleOutput:
    if rng is None:
        rng = np.random.default_rng([noise.seed, _LEARNER_STREAM, true_label])
    sites = encode(cb, true_label).values
    dists = []
    for v, n in zip(sites, cb.site_sizes):
        if noise.kind == "delta":
            d = np.zeros(n)
            d[v] = 1.0
        elif noise.kind == "symmetric":
            centre = v
            if noise.eta > 0 and rng.random() < noise.eta:
                centre = (v + int(rng.integers(1, n))) % n
            d = np.full(n, noise.eta / (n - 1))
            d[centre] = 1.0 - noise.eta
        else:
            d = rng.dirichlet(np.full(n, noise.alpha))
            top = int(np.argmax(d))
            d[top], d[v] = d[v], d[top]
        d.flags.writeable = False
        dists.append(d)
    return EnsembleOutput(tuple(dists))


@dataclass(frozen=True)
class TrialReport:
    accuracy: float
    ci95: tuple[float, float]
    trials: int
    seed: int
    correct: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "ci95": list(self.ci95),
            "trials": self.trials,
            "seed": self.seed,
            "correct": self.correct,
        }


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    p = successes / trials
    den = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


def _run_chunk(cb: Codebook, noise: NoiseModel, seed: int, lo: int, hi: int) -> int:
    correct = 0
    for t in range(lo, hi):
        # one generator per trial index: results do not depend on chunking
        rng = np.random.default_rng([seed, _TRIAL_STREAM, t])
        y = int(rng.integers(0, cb.n_classes))
        out = simulate_base_learners(cb, y, noise, rng)
        correct += decode(cb, out) == y
    return correct


def run_trials(cb: Codebook, noise: NoiseModel, trials: int, seed: int = 0) -> TrialReport:
    """Top-1 accuracy of the soft decoder over seeded random labels.

    The 95% interval is the Wilson score interval.
    """
    if trials < 1:
        raise BadParameters("trials must be >= 1")
    cb.columns  # build once before threads share it
    workers = min(n_threads(), trials)
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    if workers == 1:
        correct = _run_chunk(cb, noise, seed, 0, trials)
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = pool.map(
                lambda i: _run_chunk(cb, noise, seed, int(bounds[i]), int(bounds[i + 1])),
                range(workers),
            )
            correct = sum(parts)
    return TrialReport(correct / trials, wilson_interval(correct, trials), trials, seed, int(correct))


def load_outputs(path) -> list[EnsembleOutput]:
    """Read one ``{"dists": ...}`` document or a JSON list of them."""
    with open(path) as fh:
        doc = json.load(fh)
    docs = doc if isinstance(doc, list) else [doc]
    return [EnsembleOutput.from_json(d) for d in docs]


def delta_output(cb: Codebook, label: int) -> EnsembleOutput:
    sites = encode_many(cb, [label])[0]
    return EnsembleOutput.from_lists(
        [np.eye(n)[v] for v, n in zip(sites.tolist(), cb.site_sizes)]
    )
