"""Unitary Weingarten calculus for small order ``p``.

``Wg(., n)`` is the inverse, under convolution on ``S_p``, of
``sigma -> n^{#sigma}`` where ``#sigma`` counts cycles.  Tables are built by
inverting the ``p! x p!`` Gram matrix ``G[s, t] = n^{#(s t^{-1})}``; for
``p <= 3`` the inversion is exact over the rationals.

Index tuples are 0-based.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
import sympy

from .errors import ConsistencyError, ValidationError
from .rmt import haar_isometry, make_rng

__all__ = [
    "WeingartenTable",
    "cycle_type",
    "mobius",
    "wg_exact",
    "wg_asymptotic_check",
    "mixed_moment_exact",
    "mc_moment",
    "STANDARD_BATTERY",
]

MAX_ORDER = 6
_EXACT_ORDER = 3
_RESIDUAL_TOL = 1e-10
_SPREAD_TOL = 1e-12

Partition = tuple[int, ...]


def cycle_type(perm: Sequence[int]) -> Partition:
    """Cycle lengths of ``perm`` in decreasing order."""
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        k, length = start, 0
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def mobius(partition: Partition) -> int:
    """Signed Catalan product ``prod (-1)^{c-1} Cat(c-1)`` over the cycle lengths."""
    out = 1
    for c in partition:
        out *= (-1) ** (c - 1) * math.comb(2 * (c - 1), c - 1) // c
    return out


@lru_cache(maxsize=None)
def _symmetric_group(p: int):
    perms = list(itertools.permutations(range(p)))
    index = {s: k for k, s in enumerate(perms)}
    inv = [tuple(np.argsort(s)) for s in perms]
    # rel[a, b] = index of a o b^{-1}
    rel = np.empty((len(perms), len(perms)), dtype=np.int64)
    for a, s in enumerate(perms):
        for b, t_inv in enumerate(inv):
            rel[a, b] = index[tuple(s[t_inv[k]] for k in range(p))]
    types = [cycle_type(s) for s in perms]
    return perms, index, rel, types


def _partitions(p: int) -> list[Partition]:
    if p == 0:
        return [()]
    out = []

    def rec(rest, cap, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        for k in range(min(rest, cap), 0, -1):
            rec(rest - k, k, acc + [k])

    rec(p, p, [])
    return out


@dataclass(frozen=True)
class WeingartenTable:
    """``Wg(sigma, n)`` keyed by cycle type; ``exact`` holds rationals when available."""

    p: int
    n: int
    values: dict
    exact: dict | None
    residual: float
    class_spread: float

    def __getitem__(self, partition: Sequence[int]) -> float:
        return self.values[tuple(sorted(partition, reverse=True))]

    def of(self, perm: Sequence[int]) -> float:
        return self.values[cycle_type(perm)]


@lru_cache(maxsize=64)
def wg_exact(p: int, n: int) -> WeingartenTable:
    """Weingarten table for ``S_p`` at dimension ``n`` (requires ``1 <= p <= 6``, ``n >= p``)."""
    if not 0 <= p <= MAX_ORDER:
        raise ValidationError(f"p must lie in [0, {MAX_ORDER}]")
    if n < max(p, 1):
        raise ValidationError(f"Gram matrix is singular for n = {n} < p = {p}")
    if p == 0:
        return WeingartenTable(0, n, {(): 1.0}, {(): Fraction(1)}, 0.0, 0.0)
    perms, _, rel, types = _symmetric_group(p)
    ncyc = np.array([len(t) for t in types])
    expo = ncyc[rel]
    g_float = float(n) ** expo

    exact = None
    if p <= _EXACT_ORDER:
        g_exact = sympy.Matrix(len(perms), len(perms), lambda a, b: sympy.Integer(n) ** int(expo[a, b]))
        w_exact = g_exact.inv()
        exact_full = [[Fraction(int(x.p), int(x.q)) for x in w_exact.row(a)] for a in range(len(perms))]
        w = np.array([[float(x) for x in row] for row in exact_full])
        exact = {}
        for a, t in enumerate(types):
            exact.setdefault(t, exact_full[a][0])
    else:
        w = np.linalg.inv(g_float)

    residual = float(np.max(np.abs(g_float @ w - np.eye(len(perms)))))
    if residual > _RESIDUAL_TOL:
        raise ConsistencyError(f"Gram inverse residual {residual:.3e} exceeds {_RESIDUAL_TOL}")

    # identity is perms[0]; W[s, t] = Wg(s t^{-1})
    values = {}
    for a, t in enumerate(types):
        values.setdefault(t, float(w[a, 0]))
    ref = np.array([values[types[k]] for k in range(len(perms))])
    spread = float(np.max(np.abs(w - ref[rel])) / np.max(np.abs(w)))
    if spread > _SPREAD_TOL:
        raise ConsistencyError(f"Weingarten values are not a class function (spread {spread:.3e})")
    ordered = {t: values[t] for t in _partitions(p)}
    return WeingartenTable(p, n, ordered, exact, residual, spread)


def wg_asymptotic_check(p: int, sigma_type: Sequence[int], n_list: Sequence[int]) -> list[float]:
    """``n^{p + |sigma|} Wg(sigma, n)`` for each ``n``; tends to ``mobius(sigma)``."""
    key = tuple(sorted(sigma_type, reverse=True))
    if sum(key) != p or any(k <= 0 for k in key):
        raise ValidationError(f"{list(sigma_type)} is not a partition of {p}")
    length = p - len(key)
    return [float(n) ** (p + length) * wg_exact(p, int(n))[key] for n in n_list]


def mixed_moment_exact(
    i: Sequence[int], ip: Sequence[int], j: Sequence[int], jp: Sequence[int], n: int
) -> float:
    """``E[U_{i1 j1}...U_{ip jp} conj(U_{i'1 j'1}...U_{i'p j'p})]`` for Haar ``U``.

    Unequal numbers of ``U`` and ``conj(U)`` factors give 0.
    """
    if len(i) != len(j) or len(ip) != len(jp):
        raise ValidationError("row and column index tuples must have equal lengths")
    p = len(i)
    if len(ip) != p:
        return 0.0
    for idx in (i, ip, j, jp):
        if any(not 0 <= k < n for k in idx):
            raise ValidationError(f"indices must lie in [0, {n})")
    table = wg_exact(p, n)
    perms, index, rel, types = _symmetric_group(p)
    rows = [a for a, s in enumerate(perms) if all(i[k] == ip[s[k]] for k in range(p))]
    cols = [b for b, s in enumerate(perms) if all(j[k] == jp[s[k]] for k in range(p))]
    total = 0.0
    for a in rows:
        for b in cols:
            total += table.values[types[rel[a, b]]]
    return total


def mc_moment(
    i: Sequence[int],
    ip: Sequence[int],
    j: Sequence[int],
    jp: Sequence[int],
    n: int,
    trials: int,
    seed: int,
    batch: int = 20000,
) -> tuple[complex, float]:
    """Monte-Carlo estimate of the same monomial; returns ``(mean, stderr)``.

    Only the columns that appear are sampled (the leading columns of a Haar
    unitary form a Haar isometry).
    """
    if trials < 100:
        raise ValidationError("trials must be >= 100")
    if len(i) != len(j) or len(ip) != len(jp):
        raise ValidationError("row and column index tuples must have equal lengths")
    for idx in (i, ip, j, jp):
        if any(not 0 <= k < n for k in idx):
            raise ValidationError(f"indices must lie in [0, {n})")
    m = max(list(j) + list(jp) + [0]) + 1
    rng = make_rng(seed)
    acc = []
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        u = haar_isometry(n, m, rng, size=(b,))
        val = np.ones(b, dtype=complex)
        for r, c in zip(i, j):
            val *= u[:, r, c]
        for r, c in zip(ip, jp):
            val *= np.conj(u[:, r, c])
        acc.append(val)
        done += b
    vals = np.concatenate(acc)
    return complex(vals.mean()), float(vals.std(ddof=1) / np.sqrt(trials))


# (i, i', j, j') patterns with p <= 3 used by the exact/Monte-Carlo comparison.
STANDARD_BATTERY: tuple[tuple[tuple[int, ...], ...], ...] = (
    ((0,), (0,), (0,), (0,)),
    ((0,), (), (0,), ()),
    ((0, 0), (0, 0), (0, 0), (0, 0)),
    ((0, 1), (0, 1), (0, 1), (0, 1)),
    ((0, 1), (0, 1), (0, 1), (1, 0)),
    ((0, 0), (0, 0), (0, 1), (0, 1)),
    ((0, 0, 0), (0, 0, 0), (0, 0, 0), (0, 0, 0)),
    ((0, 1, 2), (0, 1, 2), (0, 1, 2), (0, 1, 2)),
    ((0, 0, 1), (0, 0, 1), (0, 0, 1), (0, 0, 1)),
    ((0, 1, 2), (0, 1, 2), (0, 1, 2), (1, 2, 0)),
)
