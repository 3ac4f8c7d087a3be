"""Model parameters and the outer/inner outlier domains in the plane.

For the limiting data ``(mu_Sigma, law of a)`` a point ``z`` is in

* ``Theta_out`` when ``m2(|T|) * m_{-2}(|a - z|) < 1``;
* ``Theta_in``  when ``m2(|a - z|) * m_{-2}(|T|) < 1``.

Both sets are open and, by Cauchy–Schwarz, disjoint.  Because the law of
``a`` is atomic, every moment is an exact finite sum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .measures import DiscreteMeasure, from_atoms, moment

__all__ = [
    "Theta",
    "ComplexLaw",
    "ModelSpec",
    "DomainGrid",
    "theta_classify",
    "grid_map",
    "f2_disk",
    "ring_radii",
    "outer_moment_product",
    "inner_moment_product",
]

_ATOM_TOL = 1e-28


class Theta(str, enum.Enum):
    OUT = "out"
    IN = "in"
    NEITHER = "none"


_CODES = {Theta.NEITHER: 0, Theta.OUT: 1, Theta.IN: 2}
_FROM_CODE = {v: k for k, v in _CODES.items()}


@dataclass(frozen=True)
class ComplexLaw:
    """Atomic probability law on the complex plane (the spectrum of a normal ``a``)."""

    locations: tuple[complex, ...]
    weights: tuple[float, ...]

    @classmethod
    def from_atoms(cls, locations: Sequence[complex], weights: Sequence[float]) -> "ComplexLaw":
        loc = [complex(x) for x in locations]
        w = [float(x) for x in weights]
        if len(loc) != len(w) or not loc:
            raise ValidationError("complex law needs equal, nonzero numbers of locations and weights")
        if any(not np.isfinite(x) for x in w) or min(w) <= 0:
            raise ValidationError("complex law weights must be positive")
        merged: dict[complex, float] = {}
        for x, p in zip(loc, w):
            merged[x] = merged.get(x, 0.0) + p
        total = sum(merged.values())
        if abs(total - 1.0) > 1e-13:
            merged = {k: v / total for k, v in merged.items()}
        return cls(tuple(merged), tuple(merged.values()))

    @property
    def loc_array(self) -> np.ndarray:
        return np.array(self.locations, dtype=complex)

    @property
    def weight_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=float)

    def mean(self) -> complex:
        return complex(np.sum(self.weight_array * self.loc_array))

    def norm(self) -> float:
        return float(np.max(np.abs(self.loc_array)))

    def abs_law(self, z: complex = 0.0) -> DiscreteMeasure:
        """Law of ``|a - z|`` as a measure on ``[0, inf)``."""
        return from_atoms(np.abs(self.loc_array - z), self.weight_array)

    def quantiles(self, m: int) -> np.ndarray:
        """Deterministic ``m``-point realization: the ``(k + 1/2)/m`` quantiles."""
        return _quantiles(self.loc_array, self.weight_array, m)


def _quantiles(values: np.ndarray, weights: np.ndarray, m: int) -> np.ndarray:
    if m <= 0:
        return values[:0].copy()
    cdf = np.cumsum(weights)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, (np.arange(m) + 0.5) / m, side="right")
    return values[np.minimum(idx, values.size - 1)]


@dataclass(frozen=True)
class ModelSpec:
    """Limiting data of the deformed single-ring model plus its finite-n rule.

    ``sigma_law`` is the singular-value law of ``T``; ``aprime_law`` the
    eigenvalue law of the well-conditioned part ``A'``; ``spikes`` the
    eigenvalues of the finite-rank part ``A''``.  At size ``n`` the first
    ``r = len(spikes)`` diagonal slots carry the spikes (``A'`` vanishes
    there) and the remaining slots of ``A'`` and all of ``Sigma`` are
    quantiles of the limiting laws.
    """

    sigma_law: DiscreteMeasure
    aprime_law: ComplexLaw
    spikes: tuple[complex, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if np.any(self.sigma_law.locations < 0):
            raise ValidationError("sigma_law must live on [0, inf)")
        object.__setattr__(self, "spikes", tuple(complex(s) for s in self.spikes))

    @property
    def rank(self) -> int:
        return len(self.spikes)

    def realize(self, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Diagonals of ``A'_n``, ``A''_n`` and ``Sigma_n``."""
        r = self.rank
        if n <= r:
            raise ValidationError(f"n = {n} must exceed the number of spikes {r}")
        a_prime = np.zeros(n, dtype=complex)
        a_prime[r:] = self.aprime_law.quantiles(n - r)
        a_spike = np.zeros(n, dtype=complex)
        a_spike[:r] = self.spikes
        sigma = _quantiles(self.sigma_law.locations, self.sigma_law.weights, n)
        return a_prime, a_spike, sigma

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma_law.to_dict(),
            "aprime": {
                "atoms": [[[z.real, z.imag], w] for z, w in zip(self.aprime_law.locations, self.aprime_law.weights)]
            },
            "spikes": [[s.real, s.imag] for s in self.spikes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        sigma = DiscreteMeasure.from_dict(data["sigma"])
        atoms = data["aprime"]["atoms"]
        aprime = ComplexLaw.from_atoms([complex(*a[0]) for a in atoms], [a[1] for a in atoms])
        spikes = tuple(complex(*s) for s in data.get("spikes", []))
        return cls(sigma, aprime, spikes)


@dataclass(frozen=True)
class DomainGrid:
    """Classification of a rectangular grid; ``classes[iy, ix]`` row-major, ``y`` ascending."""

    bbox: tuple[float, float, float, float]
    resolution: int
    classes: np.ndarray

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.bbox[0], self.bbox[1], self.resolution)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.bbox[2], self.bbox[3], self.resolution)

    def label(self, iy: int, ix: int) -> Theta:
        return _FROM_CODE[int(self.classes[iy, ix])]

    def lookup(self, z: complex) -> Theta:
        """Class of the grid node nearest to ``z``."""
        ix = int(np.argmin(np.abs(self.xs - z.real)))
        iy = int(np.argmin(np.abs(self.ys - z.imag)))
        return self.label(iy, ix)

    def rows(self):
        """Yield ``(x, y, class)`` in row-major order."""
        for iy, y in enumerate(self.ys):
            for ix, x in enumerate(self.xs):
                yield float(x), float(y), self.label(iy, ix)


def outer_moment_product(model: ModelSpec, z) -> np.ndarray:
    """``m2(|T|) * m_{-2}(|a - z|)``; ``inf`` at atoms of ``a``."""
    z = np.asarray(z, dtype=complex)
    d2 = np.abs(z[..., None] - model.aprime_law.loc_array) ** 2
    w = model.aprime_law.weight_array
    with np.errstate(divide="ignore"):
        m_neg = np.where(np.any(d2 < _ATOM_TOL, axis=-1), np.inf, np.sum(w / np.maximum(d2, _ATOM_TOL), axis=-1))
    return moment(model.sigma_law, 2) * m_neg


def inner_moment_product(model: ModelSpec, z) -> np.ndarray:
    """``m2(|a - z|) * m_{-2}(|T|)``; ``inf`` when ``Sigma`` charges 0."""
    z = np.asarray(z, dtype=complex)
    d2 = np.abs(z[..., None] - model.aprime_law.loc_array) ** 2
    m2 = np.sum(model.aprime_law.weight_array * d2, axis=-1)
    if model.sigma_law.inner_radius <= 0:
        return np.full(z.shape, np.inf)
    return m2 * moment(model.sigma_law, -2)


def _classify_codes(model: ModelSpec, z) -> np.ndarray:
    out = outer_moment_product(model, z) < 1.0
    inn = inner_moment_product(model, z) < 1.0
    if np.any(out & inn):
        raise AssertionError("Theta_out and Theta_in overlap")
    return np.where(out, _CODES[Theta.OUT], np.where(inn, _CODES[Theta.IN], _CODES[Theta.NEITHER])).astype(np.int8)


def theta_classify(model: ModelSpec, z: complex) -> Theta:
    """Which outlier domain contains ``z``; boundary points are ``NEITHER``."""
    return _FROM_CODE[int(_classify_codes(model, complex(z)))]


def grid_map(model: ModelSpec, bbox: Sequence[float], resolution: int) -> DomainGrid:
    if resolution < 2:
        raise ValidationError("resolution must be at least 2")
    xmin, xmax, ymin, ymax = (float(v) for v in bbox)
    xs = np.linspace(xmin, xmax, resolution)
    ys = np.linspace(ymin, ymax, resolution)
    zz = xs[None, :] + 1j * ys[:, None]
    classes = _classify_codes(model, zz)
    classes.setflags(write=False)
    return DomainGrid((xmin, xmax, ymin, ymax), resolution, classes)


def f2_disk(model: ModelSpec) -> tuple[complex, float] | None:
    """Disk form of ``Theta_in``: centre ``tau(a)`` and radius.

    Since ``m2(|a - z|) = m2(|a - tau(a)|) + |z - tau(a)|^2``, the inner
    inequality describes the open disk with squared radius
    ``1/m_{-2}(|T|) - m2(|a - tau(a)|)``.  Returns None when that is ``<= 0``.
    """
    if model.sigma_law.inner_radius <= 0:
        return None
    center = model.aprime_law.mean()
    r2 = 1.0 / moment(model.sigma_law, -2) - moment(model.aprime_law.abs_law(center), 2)
    if r2 <= 0:
        return None
    return center, float(np.sqrt(r2))


def ring_radii(model: ModelSpec) -> tuple[float, float]:
    """Inner and outer radii of the single ring when ``a = 0``."""
    if model.aprime_law.locations != (0j,):
        raise ValidationError("ring_radii requires aprime_law = delta_0")
    if model.sigma_law.inner_radius <= 0:
        raise ValidationError("ring_radii requires Sigma without an atom at 0")
    return 1.0 / np.sqrt(moment(model.sigma_law, -2)), float(np.sqrt(moment(model.sigma_law, 2)))
