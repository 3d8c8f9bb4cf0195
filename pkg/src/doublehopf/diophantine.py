"""Finite-order check of the Diophantine condition on ``(omega, alpha)``.

Every integer vector ``(k', l')`` with ``0 < |k'| + |l'| <= N`` (1-norm) is
tested against

    |<k', omega> + <l', alpha>| >= Gamma / (|k'| + |l'|)**kappa,

except the resonant direction: ``k' = 0`` and ``l'`` a nonzero multiple of
``l_perp = (l2, -l1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .invariants import ResonanceVector

MAX_LATTICE_POINTS = 20_000_000


@dataclass(frozen=True)
class DiophantineInput:
    omega: tuple[float, ...]
    alpha: tuple[float, float]
    gamma_gap: float
    kappa: float
    N: int
    ell: ResonanceVector

    def __post_init__(self):
        n = len(self.omega)
        if not self.gamma_gap > 0:
            raise ConfigError("gap Gamma must be positive")
        if not self.kappa > n - 1:
            raise ConfigError(f"kappa must exceed n - 1 = {n - 1}")
        if self.N < 0 or int(self.N) != self.N:
            raise ConfigError("truncation N must be a nonnegative integer")
        if len(self.alpha) != 2 or min(self.alpha) <= 0:
            raise ConfigError("alpha must be two positive frequencies")

    @property
    def n(self) -> int:
        return len(self.omega)


@dataclass(frozen=True)
class Violation:
    k: tuple[int, ...]
    l: tuple[int, int]
    value: float
    bound: float

    def to_dict(self) -> dict:
        return {"k": list(self.k), "l": list(self.l), "value": self.value, "bound": self.bound}


def lattice(dim: int, N: int) -> np.ndarray:
    """All integer vectors of dimension ``dim`` with ``0 < |v|_1 <= N``, in lexicographic order."""
    if N == 0:
        return np.zeros((0, dim), dtype=np.int64)
    total = (2 * N + 1) ** dim
    if total > MAX_LATTICE_POINTS:
        raise ConfigError(f"lattice of {total} points exceeds budget {MAX_LATTICE_POINTS}")
    axes = [np.arange(-N, N + 1, dtype=np.int64)] * dim
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    norm = np.abs(grid).sum(axis=1)
    return grid[(norm > 0) & (norm <= N)]


def excluded(k, l, ell: ResonanceVector) -> bool:
    """``k = 0`` and ``l`` a nonzero integer multiple of ``(l2, -l1)``."""
    if any(int(x) != 0 for x in k):
        return False
    l1, l2 = int(l[0]), int(l[1])
    return (l1, l2) != (0, 0) and l1 * ell.ell1 + l2 * ell.ell2 == 0


def _evaluate(inp: DiophantineInput):
    n = inp.n
    pts = lattice(n + 2, inp.N)
    k, l = pts[:, :n], pts[:, n:]
    # gcd(l1, l2) = 1, so l' . l = 0 exactly characterises multiples of l_perp
    resonant = (~np.any(k != 0, axis=1)) & (l[:, 0] * inp.ell.ell1 + l[:, 1] * inp.ell.ell2 == 0)
    pts = pts[~resonant]
    k, l = pts[:, :n], pts[:, n:]
    value = np.abs(k @ np.asarray(inp.omega, dtype=float) + l @ np.asarray(inp.alpha, dtype=float))
    weight = np.abs(pts).sum(axis=1).astype(float)
    return pts, value, weight


def check(inp: DiophantineInput) -> list[Violation]:
    """Lattice points violating the condition; empty means it holds up to order ``N``."""
    pts, value, weight = _evaluate(inp)
    bound = inp.gamma_gap / weight**inp.kappa
    bad = np.nonzero(value < bound)[0]
    n = inp.n
    return [
        Violation(tuple(int(x) for x in pts[i, :n]), (int(pts[i, n]), int(pts[i, n + 1])), float(value[i]), float(bound[i]))
        for i in bad
    ]


def worst_margin(inp: DiophantineInput) -> tuple[tuple[int, ...], tuple[int, int], float]:
    """Lattice point minimising ``|value| * weight**kappa``.

    The returned ratio is the largest ``Gamma`` for which :func:`check`
    passes at truncation ``N``.  Ties go to the first point in lexicographic
    order.
    """
    if inp.N < 1:
        raise ConfigError("worst_margin needs N >= 1")
    pts, value, weight = _evaluate(inp)
    ratio = value * weight**inp.kappa
    i = int(np.argmin(ratio))
    n = inp.n
    return tuple(int(x) for x in pts[i, :n]), (int(pts[i, n]), int(pts[i, n + 1])), float(ratio[i])
