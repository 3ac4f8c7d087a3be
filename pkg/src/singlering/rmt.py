"""Finite-n engine: Haar sampling, model assembly and resolvent diagnostics.

A sample of size ``n`` is

    M = A' + A'' + Y,    Y = U Sigma V,

with ``A'``, ``A''`` and ``Sigma`` diagonal and ``U, V`` independent Haar
unitaries.  ``A''`` has rank ``r`` and is factored as ``A'' = P Q``.
Resolvents ``R(z) = (A' + Y - z)^{-1}`` and ``R'(z) = (A' - z)^{-1}`` are
only ever applied through solves (``R'`` is diagonal).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import ModelSpec
from .errors import ConvergenceError, ValidationError

__all__ = [
    "make_rng",
    "haar_unitary",
    "haar_isometry",
    "ModelSample",
    "sample_model",
    "eigenvalues",
    "smallest_sv",
    "det_functions",
    "g_function",
    "series_term",
    "spectral_radius_outer",
    "spectral_radius_inner",
    "power_norms",
]


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; trial ``t`` of a run uses ``seed = base + t``."""
    return np.random.Generator(np.random.Philox(int(seed)))


def haar_isometry(n: int, m: int, rng: np.random.Generator, size: tuple[int, ...] = ()) -> np.ndarray:
    """First ``m`` columns of Haar unitaries, shape ``size + (n, m)``.

    QR of a complex Ginibre matrix with the phase correction
    ``Q -> Q diag(r_ii / |r_ii|)``, which makes ``R`` positive on the
    diagonal and ``Q`` exactly Haar-distributed.
    """
    if n < 1 or not 1 <= m <= n:
        raise ValidationError("need 1 <= m <= n")
    shape = tuple(size) + (n, m)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    return haar_isometry(n, n, rng)


@dataclass(frozen=True, eq=False)
class ModelSample:
    """One realization of the model; diagonal matrices are stored as vectors."""

    n: int
    a_prime: np.ndarray
    a_spike: np.ndarray
    p: np.ndarray
    q: np.ndarray
    sigma: np.ndarray
    u: np.ndarray
    v: np.ndarray
    y: np.ndarray
    m: np.ndarray
    seed: int | None

    @property
    def rank(self) -> int:
        return self.p.shape[1]

    @property
    def a(self) -> np.ndarray:
        """Diagonal of ``A = A' + A''``."""
        return self.a_prime + self.a_spike


def _freeze(*arrays: np.ndarray) -> None:
    for arr in arrays:
        arr.setflags(write=False)


def _spike_factors(a_spike: np.ndarray, r: int) -> tuple[np.ndarray, np.ndarray]:
    """``A'' = P Q`` from the SVD of the leading ``r x r`` block."""
    n = a_spike.size
    p = np.zeros((n, r), dtype=complex)
    q = np.zeros((r, n), dtype=complex)
    if r:
        w, s, vh = np.linalg.svd(np.diag(a_spike[:r]))
        p[:r] = w * s
        q[:, :r] = vh
    return p, q


def build_sample(
    a_prime: np.ndarray,
    a_spike: np.ndarray,
    sigma: np.ndarray,
    u: np.ndarray,
    v: np.ndarray,
    rank: int,
    seed: int | None = None,
) -> ModelSample:
    """Assemble a sample from explicit ingredients (used by tests and ``sample_model``)."""
    a_prime = np.asarray(a_prime, dtype=complex)
    a_spike = np.asarray(a_spike, dtype=complex)
    sigma = np.asarray(sigma, dtype=float)
    n = a_prime.size
    p, q = _spike_factors(a_spike, rank)
    y = (u * sigma) @ v
    m = y + np.diag(a_prime + a_spike)
    _freeze(a_prime, a_spike, sigma, p, q, u, v, y, m)
    return ModelSample(n, a_prime, a_spike, p, q, sigma, u, v, y, m, seed)


def sample_model(spec: ModelSpec, n: int, seed: int) -> ModelSample:
    """Draw ``M = A' + A'' + U Sigma V`` at size ``n``; deterministic in ``seed``."""
    a_prime, a_spike, sigma = spec.realize(n)
    rng = make_rng(seed)
    u = haar_unitary(n, rng)
    v = haar_unitary(n, rng)
    return build_sample(a_prime, a_spike, sigma, u, v, spec.rank, seed)


def eigenvalues(m: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc


def smallest_sv(m: np.ndarray, z: complex = 0.0) -> float:
    m = np.asarray(m)
    return float(np.linalg.svd(m - z * np.eye(m.shape[0]), compute_uv=False)[-1])


def _shifted_diag(a_prime: np.ndarray, z: complex) -> np.ndarray:
    d = a_prime - z
    if np.any(d == 0):
        raise ValidationError(f"A' - z is singular at z = {z}")
    return d


def g_function(a_prime: np.ndarray, p: np.ndarray, q: np.ndarray, z: complex) -> complex:
    """``det(1 + Q R'(z) P)``, equal to ``det(A - z) / det(A' - z)``."""
    r = p.shape[1]
    if r == 0:
        return 1.0 + 0j
    d = _shifted_diag(a_prime, z)
    return complex(np.linalg.det(np.eye(r) + q @ (p / d[:, None])))


def det_functions(sample: ModelSample, z: complex) -> tuple[complex, complex]:
    """``f_n(z) = det(1 + Q R(z) P)`` and ``g_n(z) = det(1 + Q R'(z) P)``.

    With ``R(z) = (A' + Y - z)^{-1}`` these satisfy
    ``det(M - z) = det(A' + Y - z) * f_n(z)`` and
    ``det(A - z) = det(A' - z) * g_n(z)``, so the zeros of ``f_n`` are the
    eigenvalues created by the finite-rank part.
    """
    r = sample.rank
    g = g_function(sample.a_prime, sample.p, sample.q, z)
    if r == 0:
        return 1.0 + 0j, g
    base = sample.y + np.diag(sample.a_prime - z)
    try:
        x = np.linalg.solve(base, sample.p)
    except np.linalg.LinAlgError as exc:
        raise ValidationError(f"A' + Y - z is singular at z = {z}") from exc
    f = complex(np.linalg.det(np.eye(r) + sample.q @ x))
    return f, g


def series_term(sample: ModelSample, z: complex, k: int, v: np.ndarray, u: np.ndarray) -> complex:
    """``v^* (R'(z) Y)^k R'(z) u`` by ``k`` multiply-and-solve passes."""
    d = _shifted_diag(sample.a_prime, z)
    x = np.asarray(u, dtype=complex) / d
    for _ in range(k):
        x = (sample.y @ x) / d
    return complex(np.vdot(v, x))


def spectral_radius_outer(sample: ModelSample, z: complex) -> float:
    """Spectral radius of ``R'(z) Y``."""
    d = _shifted_diag(sample.a_prime, z)
    return float(np.max(np.abs(eigenvalues(sample.y / d[:, None]))))


def spectral_radius_inner(sample: ModelSample, z: complex) -> float:
    """Spectral radius of ``(A' - z) Y^{-1}`` with ``Y^{-1} = V^* Sigma^{-1} U^*``."""
    if np.any(sample.sigma <= 0):
        raise ValidationError("Sigma is singular")
    y_inv = (sample.v.conj().T / sample.sigma) @ sample.u.conj().T
    b = (sample.a_prime - z)[:, None] * y_inv
    return float(np.max(np.abs(eigenvalues(b))))


def power_norms(sample: ModelSample, z: complex, kmax: int) -> np.ndarray:
    """Operator norms ``||(R'(z) Y)^k||`` for ``k = 1..kmax``."""
    d = _shifted_diag(sample.a_prime, z)
    b = sample.y / d[:, None]
    out = np.empty(kmax)
    power = np.eye(sample.n, dtype=complex)
    for k in range(kmax):
        power = b @ power
        out[k] = np.linalg.norm(power, 2)
    return out
