"""Atomic probability measures on the real line and their analytic transforms.

Every measure handled by the package is a finite weighted sum of point
masses.  The transforms (Cauchy ``G``, reciprocal ``F = 1/G``, R-transform,
absolute moments) are exact finite sums, so they double as analytic
continuations across the gaps of the support.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError, ValidationError

SYMMETRY_TOL = 1e-12
ZERO_ATOM_TOL = 1e-14
_RENORMALIZE_TOL = 1e-13

__all__ = [
    "DiscreteMeasure",
    "TransformDiagnostics",
    "from_atoms",
    "point_mass",
    "symmetric_pair",
    "symmetrize",
    "symmetrized_singular_law",
    "moment",
    "cauchy",
    "cauchy_derivative",
    "f_transform",
    "free_cumulants",
    "r_transform",
    "cauchy_bound_diag",
]


class DiscreteMeasure:
    """Finite positive measure ``sum_i w_i delta_{t_i}`` in canonical form.

    Locations are strictly increasing, duplicate locations are merged and
    all weights are positive.  Probability measures (the default) have total
    mass one; :func:`from_atoms` with ``normalize=False`` builds the finite
    measures used as Lévy–Khintchine data.

    Instances are immutable; the underlying arrays are read-only.
    """

    __slots__ = ("_locations", "_weights", "_symmetric")

    def __init__(self, locations: np.ndarray, weights: np.ndarray):
        loc = np.array(locations, dtype=float)
        w = np.array(weights, dtype=float)
        loc.setflags(write=False)
        w.setflags(write=False)
        self._locations = loc
        self._weights = w
        self._symmetric = _check_symmetric(loc, w)

    @property
    def locations(self) -> np.ndarray:
        return self._locations

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return [(float(t), float(w)) for t, w in zip(self._locations, self._weights)]

    @property
    def is_symmetric(self) -> bool:
        return self._symmetric

    @property
    def total_mass(self) -> float:
        return float(self._weights.sum())

    @property
    def radius(self) -> float:
        """Smallest ``r`` with the support inside ``[-r, r]``."""
        if self._locations.size == 0:
            return 0.0
        return float(np.max(np.abs(self._locations)))

    @property
    def inner_radius(self) -> float:
        """Largest ``eta`` with ``(-eta, eta)`` free of atoms."""
        if self._locations.size == 0:
            return np.inf
        return float(np.min(np.abs(self._locations)))

    def __len__(self) -> int:
        return int(self._locations.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return np.array_equal(self._locations, other._locations) and np.array_equal(
            self._weights, other._weights
        )

    def __hash__(self) -> int:
        return hash((self._locations.tobytes(), self._weights.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"({t:g}, {w:g})" for t, w in self.atoms)
        return f"DiscreteMeasure([{body}])"

    def dilate(self, c: float) -> "DiscreteMeasure":
        """Push-forward under ``t -> c t``."""
        return from_atoms(c * self._locations, self._weights, normalize=False)

    def to_dict(self) -> dict:
        return {"atoms": [[t, w] for t, w in self.atoms]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, normalize: bool = True) -> "DiscreteMeasure":
        try:
            atoms = data["atoms"]
            locs = [float(a[0]) for a in atoms]
            ws = [float(a[1]) for a in atoms]
        except (KeyError, TypeError, IndexError) as exc:
            raise ValidationError(f"malformed measure: {exc}") from exc
        return from_atoms(locs, ws, normalize=normalize)

    @classmethod
    def from_json(cls, text: str, normalize: bool = True) -> "DiscreteMeasure":
        return cls.from_dict(json.loads(text), normalize=normalize)


def _check_symmetric(loc: np.ndarray, w: np.ndarray) -> bool:
    if loc.size == 0:
        return True
    return bool(
        np.allclose(loc, -loc[::-1], rtol=0.0, atol=SYMMETRY_TOL)
        and np.allclose(w, w[::-1], rtol=0.0, atol=SYMMETRY_TOL)
    )


@dataclass(frozen=True)
class TransformDiagnostics:
    """Result of a sup-norm check of ``|G(i eta)|`` on a decreasing eta grid."""

    eta_grid: np.ndarray
    bound: float
    passed: bool


def from_atoms(
    locations: Sequence[float] | np.ndarray,
    weights: Sequence[float] | np.ndarray,
    normalize: bool = True,
) -> DiscreteMeasure:
    """Build a canonical measure from (location, weight) pairs.

    Parameters
    ----------
    locations, weights : array_like
        Atom positions and their positive masses, equal lengths.
    normalize : bool
        Rescale to total mass one (the default).  With ``normalize=False``
        an empty input yields the zero measure.

    Raises
    ------
    ValidationError
        On empty input (probability case), unequal lengths, non-finite
        values or a non-positive weight.
    """
    loc = np.asarray(locations, dtype=float).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    if loc.shape != w.shape:
        raise ValidationError("locations and weights must have equal lengths")
    if loc.size == 0:
        if normalize:
            raise ValidationError("a probability measure needs at least one atom")
        return DiscreteMeasure(loc, w)
    if not (np.all(np.isfinite(loc)) and np.all(np.isfinite(w))):
        raise ValidationError("atoms must be finite")
    if np.any(w <= 0):
        raise ValidationError("weights must be strictly positive")

    uniq, inverse = np.unique(loc, return_inverse=True)
    merged = np.bincount(inverse, weights=w, minlength=uniq.size)
    if normalize:
        total = merged.sum()
        if abs(total - 1.0) > _RENORMALIZE_TOL:
            merged = merged / total
    return DiscreteMeasure(uniq, merged)


def point_mass(t: float = 0.0) -> DiscreteMeasure:
    return from_atoms([t], [1.0])


def symmetric_pair(a: float) -> DiscreteMeasure:
    """``(delta_{-a} + delta_a) / 2``."""
    return from_atoms([-a, a], [0.5, 0.5])


def symmetrize(mu: DiscreteMeasure) -> DiscreteMeasure:
    """Even reflection ``B -> (mu(B) + mu(-B)) / 2``."""
    loc = np.concatenate([mu.locations, -mu.locations])
    w = np.concatenate([mu.weights, mu.weights]) / 2.0
    # -0.0 and 0.0 merge in np.unique, so a mass at 0 is kept whole.
    return from_atoms(loc, w, normalize=False)


def symmetrized_singular_law(m: np.ndarray, shift: complex = 0.0) -> DiscreteMeasure:
    """Symmetrized empirical singular-value law of ``m - shift * I``."""
    m = np.atleast_2d(np.asarray(m))
    n = m.shape[0]
    s = np.linalg.svd(m - shift * np.eye(n), compute_uv=False)
    w = np.full(n, 1.0 / n)
    return symmetrize(from_atoms(s, w))


def moment(mu: DiscreteMeasure, p: float) -> float:
    """Absolute moment ``int |t|^p dmu(t)``; negative ``p`` needs no atom at 0."""
    a = np.abs(mu.locations)
    if p < 0 and np.any(a < ZERO_ATOM_TOL):
        raise DomainError(f"moment of order {p} is infinite: measure charges 0")
    if p == 0:
        return mu.total_mass
    return float(np.sum(mu.weights * a**p))


def _diffs(mu: DiscreteMeasure, z) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z, dtype=complex)
    d = z[..., None] - mu.locations
    if np.any(d == 0):
        raise PoleError("evaluation point coincides with an atom")
    return z, d


def cauchy(mu: DiscreteMeasure, z):
    """Cauchy transform ``G(z) = sum_i w_i / (z - t_i)``.

    Accepts scalars or arrays; off the real axis the result satisfies
    ``Im G(z) < 0`` whenever ``Im z > 0``.
    """
    z, d = _diffs(mu, z)
    g = np.sum(mu.weights / d, axis=-1)
    return complex(g) if g.ndim == 0 else g


def cauchy_derivative(mu: DiscreteMeasure, z):
    z, d = _diffs(mu, z)
    g = -np.sum(mu.weights / d**2, axis=-1)
    return complex(g) if g.ndim == 0 else g


def f_transform(mu: DiscreteMeasure, z):
    """Reciprocal Cauchy transform ``F = 1/G``."""
    return 1.0 / cauchy(mu, z)


def free_cumulants(mu: DiscreteMeasure, order: int) -> np.ndarray:
    """Free cumulants ``kappa_1..kappa_order`` from the moment recursion.

    Uses ``M(z) = C(z M(z))`` with ``M = 1 + sum m_k z^k`` and
    ``C = 1 + sum kappa_k z^k``.  Index 0 of the result is ``kappa_1``.
    """
    m = np.array([np.sum(mu.weights * mu.locations**k) for k in range(order + 1)])
    kappa = np.zeros(order + 1)
    # powers[s] holds the truncated coefficients of M(z)^s.
    powers = [np.zeros(order + 1) for _ in range(order + 1)]
    powers[0][0] = 1.0
    for s in range(1, order + 1):
        powers[s] = np.convolve(powers[s - 1], m)[: order + 1]
    for k in range(1, order + 1):
        acc = m[k]
        for s in range(1, k):
            acc -= kappa[s] * powers[s][k - s]
        kappa[k] = acc
    return kappa[1:]


def r_transform(mu: DiscreteMeasure, w: complex, max_iter: int = 200) -> complex:
    """R-transform ``R(w) = G^{-1}(w) - 1/w`` on ``|w| < 1/(6r)``.

    ``G^{-1}`` is the branch defined near infinity.  Newton's method runs on
    ``u = R(w)`` directly, started at ``kappa_1 + kappa_2 w``; the result is
    checked to satisfy ``G(u + 1/w) = w`` with ``|u + 1/w| > 4r``.
    """
    w = complex(w)
    r = mu.radius
    if r > 0 and not abs(w) < 1.0 / (6.0 * r):
        raise DomainError(f"|w| = {abs(w):.6g} outside R-transform disk 1/(6r) = {1 / (6 * r):.6g}")
    kappa1, kappa2 = free_cumulants(mu, 2)
    if w == 0:
        return complex(kappa1)
    if r == 0:
        return 0j

    # Newton on u = R(w): G(u + 1/w) = w rewritten as
    # sum_i w_i (u - t_i) / (1 + w (u - t_i)) = 0, which avoids the
    # cancellation in (u + 1/w) - 1/w for small |w|.
    t, p = mu.locations, mu.weights
    u = complex(kappa1 + kappa2 * w)
    for _ in range(max_iter):
        d = u - t
        den = 1.0 + w * d
        psi = np.sum(p * d / den)
        dpsi = np.sum(p / den**2)
        step = psi / dpsi
        u -= step
        if abs(step) <= 1e-15 * max(1.0, abs(u)):
            break
    else:
        raise ConvergenceError("Newton inversion of G did not converge")
    y = u + 1.0 / w
    if abs(y) <= 4.0 * r * (1 - 1e-12) or abs(cauchy(mu, y) - w) > 1e-12:
        raise ConvergenceError("Newton inversion of G left the univalent branch")
    return complex(u)


def cauchy_bound_diag(
    mu: DiscreteMeasure, kappa1: float, kappa2: float, n: int, points: int = 200
) -> TransformDiagnostics:
    """Check ``|G(i eta)| <= kappa2`` for ``eta`` in ``[n^-kappa1, 1]``."""
    if not mu.is_symmetric:
        raise ValidationError("cauchy_bound_diag expects a symmetric measure")
    eta = np.logspace(0.0, -kappa1 * np.log10(n), points)
    bound = float(np.max(np.abs(cauchy(mu, 1j * eta))))
    eta.setflags(write=False)
    return TransformDiagnostics(eta_grid=eta, bound=bound, passed=bound <= kappa2)


def as_measure(obj: DiscreteMeasure | Iterable) -> DiscreteMeasure:
    """Coerce ``[(t, w), ...]`` pairs to a measure; pass measures through."""
    if isinstance(obj, DiscreteMeasure):
        return obj
    pairs = list(obj)
    return from_atoms([p[0] for p in pairs], [p[1] for p in pairs])
