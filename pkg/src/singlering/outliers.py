"""Monte-Carlo checks of outlier stability (outer domain) and emptiness (inner domain)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .domains import ModelSpec, Theta, f2_disk, theta_classify
from .errors import ValidationError
from .rmt import eigenvalues, g_function, sample_model, _spike_factors

__all__ = [
    "SpikeMatch",
    "SpikeStats",
    "OutlierReport",
    "match_spikes",
    "stability_margin",
    "inner_empty_check",
    "circle",
    "run_experiment",
]


@dataclass(frozen=True)
class SpikeMatch:
    spike: complex
    count: int
    distance: float

    @property
    def matched(self) -> bool:
        return self.count == 1


@dataclass(frozen=True)
class SpikeStats:
    spike: complex
    match_count: int
    count_agreement: int
    mean_distance: float
    max_distance: float

    def to_dict(self) -> dict:
        return {
            "spike": [self.spike.real, self.spike.imag],
            "match_count": self.match_count,
            "count_agreement": self.count_agreement,
            "mean_distance": self.mean_distance,
            "max_distance": self.max_distance,
        }


@dataclass(frozen=True)
class OutlierReport:
    """Aggregate of ``trials`` independent samples, folded in trial order.

    ``per_spike`` covers the outer-domain spikes.  ``inner_violations`` is
    the total number of eigenvalues found in the shrunk inner disk over all
    trials, ``inner_violation_trials`` the number of trials with at least one.
    """

    n: int
    trials: int
    tol: float
    per_spike: tuple[SpikeStats, ...]
    inner_disk: tuple[complex, float] | None
    inner_violations: int
    inner_violation_trials: int
    stability_margin: float
    seeds: tuple[int, ...]
    trial_eigenvalues: tuple[np.ndarray, ...] | None = field(default=None, compare=False, repr=False)

    @property
    def pooled_eigenvalues(self) -> np.ndarray | None:
        if self.trial_eigenvalues is None:
            return None
        return np.concatenate(self.trial_eigenvalues)

    def spike(self, z: complex) -> SpikeStats:
        for s in self.per_spike:
            if s.spike == z:
                return s
        raise KeyError(z)

    def to_dict(self) -> dict:
        disk = None
        if self.inner_disk is not None:
            c, rad = self.inner_disk
            disk = {"center": [c.real, c.imag], "radius": rad}
        return {
            "n": self.n,
            "trials": self.trials,
            "tol": self.tol,
            "per_spike": [s.to_dict() for s in self.per_spike],
            "inner_disk": disk,
            "inner_violations": self.inner_violations,
            "inner_violation_trials": self.inner_violation_trials,
            "stability_margin": self.stability_margin,
            "seeds": list(self.seeds),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "OutlierReport":
        disk = data["inner_disk"]
        return cls(
            n=data["n"],
            trials=data["trials"],
            tol=data["tol"],
            per_spike=tuple(
                SpikeStats(complex(*s["spike"]), s["match_count"], s["count_agreement"], s["mean_distance"], s["max_distance"])
                for s in data["per_spike"]
            ),
            inner_disk=None if disk is None else (complex(*disk["center"]), disk["radius"]),
            inner_violations=data["inner_violations"],
            inner_violation_trials=data["inner_violation_trials"],
            stability_margin=data["stability_margin"],
            seeds=tuple(data["seeds"]),
        )


def match_spikes(eigs: Sequence[complex], spikes_out: Sequence[complex], tol: float) -> list[SpikeMatch]:
    """Eigenvalues within ``tol`` of each spike; a spike matches when there is exactly one.

    ``distance`` is the distance to the nearest eigenvalue (``inf`` if none).
    """
    if not tol > 0:
        raise ValidationError("tol must be positive")
    spikes = np.asarray(spikes_out, dtype=complex)
    if spikes.size > 1:
        sep = np.abs(spikes[:, None] - spikes[None, :])
        np.fill_diagonal(sep, np.inf)
        if sep.min() <= 2 * tol:
            raise ValidationError("spikes must be separated by more than 2 * tol")
    eigs = np.asarray(eigs, dtype=complex)
    out = []
    for s in spikes:
        dist = np.abs(eigs - s)
        out.append(SpikeMatch(complex(s), int(np.sum(dist <= tol)), float(dist.min()) if dist.size else np.inf))
    return out


def circle(center: complex, radius: float, points: int = 64) -> np.ndarray:
    theta = 2 * np.pi * np.arange(points) / points
    return center + radius * np.exp(1j * theta)


def stability_margin(spec: ModelSpec, n: int, boundary: Sequence[complex]) -> float:
    """``min |det(A_n - z) / det(A'_n - z)|`` over the boundary sample."""
    a_prime, a_spike, _ = spec.realize(n)
    p, q = _spike_factors(a_spike, spec.rank)
    return float(min(abs(g_function(a_prime, p, q, complex(z))) for z in boundary))


def inner_empty_check(eigs: Sequence[complex], center: complex, radius: float) -> int:
    """Number of eigenvalues in the closed disk."""
    return int(np.sum(np.abs(np.asarray(eigs) - center) <= radius))


def run_experiment(
    spec: ModelSpec,
    n: int,
    trials: int,
    tol: float,
    base_seed: int,
    keep_eigenvalues: bool = False,
) -> OutlierReport:
    """Repeat sample/diagonalize/match over ``trials`` seeds ``base_seed + t``."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    outer = [s for s in spec.spikes if theta_classify(spec, s) is Theta.OUT]
    disk = f2_disk(spec)
    inner = None
    if disk is not None and disk[1] > tol:
        inner = (disk[0], disk[1] - tol)

    a_diag = spec.realize(n)
    a_full = a_diag[0] + a_diag[1]
    a_counts = [int(np.sum(np.abs(a_full - s) <= tol)) for s in outer]

    seeds = tuple(base_seed + t for t in range(trials))
    matches = np.zeros(len(outer), dtype=int)
    agree = np.zeros(len(outer), dtype=int)
    dists = [[] for _ in outer]
    violations = 0
    violation_trials = 0
    pooled = []
    for seed in seeds:
        eigs = eigenvalues(sample_model(spec, n, seed).m)
        if keep_eigenvalues:
            pooled.append(eigs)
        for k, m in enumerate(match_spikes(eigs, outer, tol)):
            matches[k] += m.matched
            agree[k] += m.count == a_counts[k]
            dists[k].append(m.distance)
        if inner is not None:
            c = inner_empty_check(eigs, *inner)
            violations += c
            violation_trials += c > 0

    per_spike = tuple(
        SpikeStats(s, int(matches[k]), int(agree[k]), float(np.mean(dists[k])), float(np.max(dists[k])))
        for k, s in enumerate(outer)
    )
    margin = 1.0
    if spec.rank:
        margin = min((stability_margin(spec, n, circle(s, tol)) for s in outer), default=1.0)
    return OutlierReport(
        n=n,
        trials=trials,
        tol=tol,
        per_spike=per_spike,
        inner_disk=inner,
        inner_violations=int(violations),
        inner_violation_trials=int(violation_trials),
        stability_margin=float(margin),
        seeds=seeds,
        trial_eigenvalues=tuple(pooled) if keep_eigenvalues else None,
    )
