"""Subordination for free additive convolution of atomic measures.

``solve`` returns the pair ``(omega1, omega2)`` with

    G_{mu1 [+] mu2}(z) = G_1(omega1(z)) = G_2(omega2(z)),

via the Belinschi–Bercovici fixed-point map ``w -> z + H1(z + H2(w))``
where ``H_i = F_i - id``.  The remaining functions work near the origin of
the real line: the local inverses ``h1, h2`` of the subordination functions,
a computable certificate that ``0`` is outside the support of the
convolution, a Stieltjes-inversion density oracle, and the explicit left
inverse available when ``mu2`` is freely infinitely divisible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import (
    ConsistencyError,
    ConvergenceError,
    DomainError,
    NoGapError,
    PoleError,
    ValidationError,
)
from .measures import (
    DiscreteMeasure,
    cauchy,
    free_cumulants,
    moment,
    r_transform,
)

__all__ = [
    "Side",
    "SubordinationSolution",
    "SupportGapCertificate",
    "solve",
    "h_map",
    "support_gap",
    "density_on_grid",
    "infdiv_phi",
    "infdiv_subordination",
    "infdiv_boundary_nu",
]

RESIDUAL_TOL = 1e-10
NU_TOL = 1e-10


class Side(str, enum.Enum):
    H1 = "H1"
    H2 = "H2"


@dataclass(frozen=True)
class SubordinationSolution:
    z: complex
    omega1: complex
    omega2: complex
    g_value: complex
    iterations: int
    residual: float

    @property
    def f_value(self) -> complex:
        return 1.0 / self.g_value


@dataclass(frozen=True)
class SupportGapCertificate:
    """Certified interval ``[-epsilon, epsilon]`` outside ``supp(mu1 [+] mu2)``.

    ``gamma`` and ``K`` are the radius and cubic-error constant of the
    monotonicity argument for ``h``; ``delta`` is the (conservative) radius on
    which the R-transform tail is dominated, ``eta`` the half-width of the
    atom-free window of the measure ``h`` is built from, ``eta0`` its
    truncation.
    """

    gamma: float
    K: float
    epsilon: float
    side: Side
    delta: float
    eta: float
    eta0: float
    kappa4: float
    moment_product: float


def _point_mass_location(mu: DiscreteMeasure) -> float | None:
    return float(mu.locations[0]) if len(mu) == 1 else None


def _h_funcs(mu: DiscreteMeasure) -> tuple[Callable, Callable]:
    """``H = F - id`` and its derivative.

    Written as ``H(w) = -A(w)/G(w)`` with ``A(w) = sum p_i t_i / (w - t_i)``;
    the naive ``1/G(w) - w`` cancels catastrophically for large ``|w|``.
    """
    t, p = mu.locations, mu.weights

    def h(w):
        d = w - t
        if np.any(d == 0):
            raise PoleError("evaluation point coincides with an atom")
        return -np.sum(p * t / d) / np.sum(p / d)

    def dh(w):
        d = w - t
        g, dg = np.sum(p / d), -np.sum(p / d**2)
        a, da = np.sum(p * t / d), -np.sum(p * t / d**2)
        return -(da * g - a * dg) / g**2

    return h, dh


def _newton_fixed_point(f, df, w0: complex, floor: float, max_iter: int = 60) -> complex | None:
    """Newton on ``w - f(w) = 0``; returns None unless it lands in ``Im w > floor``."""
    w = w0
    try:
        for _ in range(max_iter):
            step = (w - f(w)) / (1.0 - df(w))
            w = w - step
            if not np.isfinite(w):
                return None
            if abs(step) <= 1e-15 * max(1.0, abs(w)):
                break
        else:
            return None
        if w.imag <= floor or abs(w - f(w)) > 1e-13 * max(1.0, abs(w)):
            return None
    except (ZeroDivisionError, PoleError, FloatingPointError):
        return None
    return w


def solve(
    mu1: DiscreteMeasure,
    mu2: DiscreteMeasure,
    z: complex,
    tol: float = 1e-13,
    max_iter: int = 10_000,
    init: complex | None = None,
) -> SubordinationSolution:
    """Subordination functions of ``mu1 [+] mu2`` at ``z`` in the upper half-plane.

    Parameters
    ----------
    mu1, mu2 : DiscreteMeasure
        Probability measures.  A point mass on either side is handled by the
        exact translation rule.
    z : complex
        Evaluation point, ``Im z > 0``.
    tol : float
        Stopping threshold on successive iterates (relative to ``max(1, |w|)``).
    max_iter : int
        Iteration cap for the fixed-point map.
    init : complex, optional
        Warm start for ``omega2`` (e.g. the solution at a neighbouring grid
        point).  It is only used for a Newton attempt; the guaranteed
        fixed-point iteration from ``w0 = z`` remains the fallback.

    Returns
    -------
    SubordinationSolution

    Raises
    ------
    ValidationError
        If ``Im z <= 0``.
    ConvergenceError
        If no fixed point is found or the residual ``|G1(omega1) - G2(omega2)|``
        exceeds ``1e-10`` (scaled by ``max(1, |G|)``).
    """
    z = complex(z)
    if not z.imag > 0:
        raise ValidationError("subordination requires Im z > 0")

    c2 = _point_mass_location(mu2)
    c1 = _point_mass_location(mu1)
    if c2 is not None:
        omega1 = z - c2
        g = cauchy(mu1, omega1)
        omega2 = c2 + 1.0 / g
        return SubordinationSolution(z, omega1, omega2, g, 0, abs(g - cauchy(mu2, omega2)))
    if c1 is not None:
        omega2 = z - c1
        g = cauchy(mu2, omega2)
        omega1 = c1 + 1.0 / g
        return SubordinationSolution(z, omega1, omega2, g, 0, abs(cauchy(mu1, omega1) - g))

    h1, dh1 = _h_funcs(mu1)
    h2, dh2 = _h_funcs(mu2)

    def f(w):
        return z + h1(z + h2(w))

    def df(w):
        return dh1(z + h2(w)) * dh2(w)

    # any fixed point in the upper half-plane is the Denjoy-Wolff point
    floor = 0.5 * z.imag
    w = None
    iterations = 0
    if init is not None:
        w = _newton_fixed_point(f, df, complex(init), floor)
    if w is None:
        w = z
        converged = False
        for iterations in range(1, max_iter + 1):
            w_next = f(w)
            if abs(w_next - w) < tol * max(1.0, abs(w_next)):
                w = w_next
                converged = True
                break
            w = w_next
            if iterations % 25 == 0:
                polished = _newton_fixed_point(f, df, w, floor)
                if polished is not None:
                    w = polished
                    converged = True
                    break
        if not converged:
            raise ConvergenceError(f"subordination iteration did not converge at z={z}")

    omega2 = w
    omega1 = z + h2(omega2)
    g = cauchy(mu1, omega1)
    residual = abs(g - cauchy(mu2, omega2))
    if residual > RESIDUAL_TOL * max(1.0, abs(g)):
        raise ConvergenceError(f"subordination residual {residual:.3g} too large at z={z}")
    return SubordinationSolution(z, omega1, omega2, g, iterations, float(residual))


def _sides(side, mu1, mu2) -> tuple[Side, DiscreteMeasure, DiscreteMeasure]:
    side = Side(side)
    return (side, mu1, mu2) if side is Side.H1 else (side, mu2, mu1)


def h_map(side, mu1: DiscreteMeasure, mu2: DiscreteMeasure, z: complex) -> complex:
    """Local inverse ``h1(z) = z + R2(G1(z))`` (or ``h2`` with roles swapped).

    Raises
    ------
    DomainError
        If ``|G_own(z)| >= 1/(6 s_other)``, where the R-transform of the other
        measure is not defined.
    """
    _, own, other = _sides(side, mu1, mu2)
    g = cauchy(own, z)
    s = other.radius
    if s > 0 and not abs(g) < 1.0 / (6.0 * s):
        raise DomainError(f"|G({z})| = {abs(g):.6g} outside the R-transform disk")
    return complex(z) + r_transform(other, g)


def _tail_radius(s: float) -> float:
    """Radius on which ``|w|^2 sum_{n>=3} |kappa_2n| |w|^(2n-6) <= 1``.

    Uses ``|kappa_k| <= (16 s)^k``, from ``|NC(k)| <= 4^k`` and
    ``|Moebius| <= 4^k`` in the moment-cumulant formula.
    """
    if s == 0:
        return np.inf
    c = 16.0 * s
    return 1.0 / np.sqrt(c**6 + c**2)


def support_gap(
    mu1: DiscreteMeasure, mu2: DiscreteMeasure, side="H1", grid_points: int = 1000
) -> SupportGapCertificate:
    """Certify a symmetric interval around 0 outside ``supp(mu1 [+] mu2)``.

    For side ``H1`` the measure ``mu1`` must have an atom-free window
    ``(-eta, eta)`` and ``m2(mu2) m_{-2}(mu1) < 1``; ``H2`` swaps the roles.
    With ``eta0 = min(eta, 2^{-1/4}, 1/(12 (s1 + s2)))``,

        K     = 2 m2(other) eta^-4 + 8 (|kappa4(other)| + 1) eta^-6
        gamma = min(eta0^3, delta eta^2 / 2, (1 - m2 m_{-2}) / (4 K))

    ``h`` is strictly increasing on ``(-gamma/2, gamma/2)`` (checked on a
    grid) and ``epsilon = h(gamma/4)``.

    Raises
    ------
    NoGapError
        If the moment product is ``>= 1`` or the own measure charges 0.
    ConsistencyError
        If the grid check of monotonicity fails.
    """
    side, own, other = _sides(side, mu1, mu2)
    eta = own.inner_radius
    if not eta > 0:
        raise NoGapError("measure charges 0; no atom-free window around the origin")
    product = moment(other, 2) * moment(own, -2)
    if not product < 1.0:
        raise NoGapError(f"m2 * m_-2 = {product:.12g} >= 1; no certified gap")

    s_own, s_other = own.radius, other.radius
    eta0 = min(eta, 2.0**-0.25, 1.0 / (12.0 * (s_own + s_other)))
    kappa4 = float(free_cumulants(other, 4)[3])
    K = 2.0 * moment(other, 2) * eta**-4 + 8.0 * (abs(kappa4) + 1.0) * eta**-6
    delta = min(_tail_radius(s_other), np.inf if s_other == 0 else 1.0 / (12.0 * s_other))
    gamma = min(eta0**3, delta * eta**2 / 2.0, (1.0 - product) / (4.0 * K))

    xs = np.linspace(-gamma / 2, gamma / 2, grid_points + 2)[1:-1]
    hs = np.array([h_map(side, mu1, mu2, x).real for x in xs])
    if not np.all(np.diff(hs) > 0):
        raise ConsistencyError("h is not increasing on the certified window")
    epsilon = h_map(side, mu1, mu2, gamma / 4).real
    if not epsilon > 0:
        raise ConsistencyError("certified half-width is not positive")
    return SupportGapCertificate(
        gamma=float(gamma),
        K=float(K),
        epsilon=float(epsilon),
        side=side,
        delta=float(delta),
        eta=float(eta),
        eta0=float(eta0),
        kappa4=kappa4,
        moment_product=float(product),
    )


def density_on_grid(
    mu1: DiscreteMeasure,
    mu2: DiscreteMeasure,
    interval: tuple[float, float],
    points: int,
    eta: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Poisson-smoothed density ``-Im G(x + i eta) / pi`` of ``mu1 [+] mu2``.

    Returns the grid ``x`` and the density values.  Each point warm-starts
    from its neighbour's ``omega2``.
    """
    if not eta > 0:
        raise ValidationError("eta must be positive")
    xs = np.linspace(interval[0], interval[1], points)
    dens = np.empty(points)
    init = None
    for k, x in enumerate(xs):
        sol = solve(mu1, mu2, complex(x, eta), init=init)
        init = sol.omega2
        dens[k] = -sol.g_value.imag / np.pi
    return xs, dens


def _check_sigma(sigma: DiscreteMeasure) -> None:
    if len(sigma) and not sigma.is_symmetric:
        raise ValidationError("sigma must be a symmetric finite measure")


def infdiv_phi(mu1: DiscreteMeasure, sigma: DiscreteMeasure, x: float) -> float:
    """Left inverse ``phi(x) = x + int dsigma(xi) / (F1(x) - xi)`` on a gap of ``mu1``.

    ``sigma`` is the finite measure in the Voiculescu transform
    ``phi_2(z) = int dsigma(xi)/(z - xi)`` of the freely infinitely divisible
    ``mu2``.  Requires ``|F1(x)| > max |atom of sigma|``.
    """
    _check_sigma(sigma)
    if len(sigma) == 0:
        return float(x)
    f1 = (1.0 / cauchy(mu1, complex(x))).real
    if not abs(f1) > sigma.radius:
        raise DomainError(f"|F1({x})| = {abs(f1):.6g} does not exceed the support of sigma")
    return float(x + np.sum(sigma.weights / (f1 - sigma.locations)))


def infdiv_subordination(
    mu1: DiscreteMeasure,
    sigma: DiscreteMeasure,
    z: complex,
    tol: float = 1e-14,
    max_iter: int = 100_000,
) -> tuple[complex, complex]:
    """``omega1`` and ``G_{mu1 [+] mu2}`` at ``z`` for infinitely divisible ``mu2``.

    Iterates ``w -> z - int dsigma(xi) / (F1(w) - xi)``, a self-map of the
    upper half-plane.
    """
    _check_sigma(sigma)
    z = complex(z)
    if not z.imag > 0:
        raise ValidationError("requires Im z > 0")
    w = z
    for _ in range(max_iter):
        f1 = 1.0 / cauchy(mu1, w)
        w_next = z - np.sum(sigma.weights / (f1 - sigma.locations))
        if abs(w_next - w) < tol * max(1.0, abs(w_next)):
            w = w_next
            break
        w = w_next
    else:
        raise ConvergenceError("infinitely divisible subordination did not converge")
    return complex(w), cauchy(mu1, w)


def _nu_integral(mu1: DiscreteMeasure, sigma: DiscreteMeasure, x: float, y: float) -> float:
    # int dlambda_xi(t) / ((x-t)^2 + y^2) = -Im G_{lambda_xi}(x+iy) / y, and
    # G_{lambda_xi} = 1 / (F1 - xi) exactly.
    f1 = 1.0 / cauchy(mu1, complex(x, y))
    g = 1.0 / (f1 - sigma.locations)
    return float(np.sum(sigma.weights * (-g.imag)) / y)


def infdiv_boundary_nu(
    mu1: DiscreteMeasure, sigma: DiscreteMeasure, x: float, y_floor: float = 1e-12
) -> float:
    """Lower boundary ``nu(x)`` of the image of ``omega1``.

    ``nu(x) = inf{y > 0 : int int dlambda_xi(t)/((x-t)^2 + y^2) dsigma(xi) < 1}``
    with ``F_{lambda_xi} = F1 - xi``; the inner integral is decreasing in
    ``y`` and is located by bisection to ``1e-10``.  Returns 0 when the
    integral is already below 1 at ``y = y_floor``.
    """
    _check_sigma(sigma)
    if len(sigma) == 0:
        return 0.0

    def excess(y):
        return _nu_integral(mu1, sigma, x, y) - 1.0

    if excess(y_floor) < 0:
        return 0.0
    # each inner integral is at most 1/y^2
    y_hi = np.sqrt(sigma.total_mass) + 1.0
    return float(optimize.bisect(excess, y_floor, y_hi, xtol=NU_TOL))
