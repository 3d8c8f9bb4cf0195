"""Invariant algebra of the l1:l2 resonant linear flow.

Four invariants describe the flow of ``dZ_j/dt = i*alpha_j*Z_j`` when the
normal frequencies are in l1:l2 resonance: two amplitudes ``tau1, tau2``
and the real and imaginary part ``tau3, tau4`` of the resonant monomial
``Z1**l2 * conj(Z2)**l1``.  They satisfy a single syzygy

    tau1**l2 * tau2**l1 - G * (tau3**2 + tau4**2) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidResonanceError

MAX_ORDER = 20


def _extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y = g = gcd(a, b)``."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    return old_r, old_x, old_y


@dataclass(frozen=True)
class ResonanceVector:
    """Weak normal-normal resonance ``l2*alpha1 = l1*alpha2``.

    ``m = (m1, m2)`` completes ``(l2, -l1)`` to a unimodular matrix so that
    ``theta = l2*phi1 - l1*phi2`` and ``vartheta = m1*phi1 + m2*phi2`` is a
    torus diffeomorphism.
    """

    ell1: int
    ell2: int
    m1: int
    m2: int
    g_ell: float = field(repr=False)

    @property
    def order(self) -> int:
        """``|l| = l1 + l2``."""
        return self.ell1 + self.ell2

    @property
    def perp(self) -> np.ndarray:
        """``l_perp = (l2, -l1)``."""
        return np.array([self.ell2, -self.ell1], dtype=float)

    @property
    def star(self) -> np.ndarray:
        """``l_star = (l2, l1)``."""
        return np.array([self.ell2, self.ell1], dtype=float)

    @property
    def angle_matrix(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.ell2, -self.ell1), (self.m1, self.m2))

    def angle_determinant(self) -> int:
        return self.ell2 * self.m2 + self.ell1 * self.m1


def make_resonance(ell1: int, ell2: int) -> ResonanceVector:
    """Build a validated :class:`ResonanceVector` for the pair ``(ell1, ell2)``.

    The complement ``m`` is the Bezout pair returned by the extended
    Euclidean algorithm applied to ``(ell1, ell2)``, i.e. ``m1*ell1 + m2*ell2
    = 1``.
    """
    if int(ell1) != ell1 or int(ell2) != ell2:
        raise InvalidResonanceError(f"resonance must be integer, got ({ell1}, {ell2})")
    ell1, ell2 = int(ell1), int(ell2)
    if not 0 < ell1 < ell2:
        raise InvalidResonanceError(
            f"strong/invalid resonance ({ell1}, {ell2}): need 0 < l1 < l2"
        )
    if math.gcd(ell1, ell2) != 1:
        raise InvalidResonanceError(
            f"strong/invalid resonance ({ell1}, {ell2}): gcd must be 1"
        )
    if ell1 + ell2 > MAX_ORDER:
        raise InvalidResonanceError(f"|l| = {ell1 + ell2} exceeds cap {MAX_ORDER}")
    _, m1, m2 = _extended_gcd(ell1, ell2)
    num = math.factorial(ell1) ** 2 * math.factorial(ell2) ** 2
    g_ell = num / 2 ** (ell1 + ell2)
    return ResonanceVector(ell1, ell2, m1, m2, g_ell)


@dataclass(frozen=True)
class InvariantState:
    tau1: float
    tau2: float
    tau3: float
    tau4: float

    def as_array(self) -> np.ndarray:
        return np.array([self.tau1, self.tau2, self.tau3, self.tau4])


def invariants_from_complex(z1: complex, z2: complex, ell: ResonanceVector) -> InvariantState:
    z1, z2 = complex(z1), complex(z2)
    mono = z1**ell.ell2 * z2.conjugate() ** ell.ell1
    denom = math.factorial(ell.ell1) * math.factorial(ell.ell2)
    return InvariantState(
        0.5 * abs(z1) ** 2,
        0.5 * abs(z2) ** 2,
        mono.real / denom,
        mono.imag / denom,
    )


def syzygy_residual(tau: InvariantState, ell: ResonanceVector) -> float:
    return tau.tau1**ell.ell2 * tau.tau2**ell.ell1 - ell.g_ell * (tau.tau3**2 + tau.tau4**2)


def phases_from_amplitudes(
    tau1: float, tau2: float, theta: float, ell: ResonanceVector
) -> tuple[float, float]:
    """Phase invariants on the fibre over ``(tau1, tau2)`` at resonant angle ``theta``.

    The fibre radius is ``sqrt(tau1^l2 tau2^l1 / G)``, the value forced by
    the syzygy and by the definition of the invariants through ``Z_j``.
    """
    if tau1 < 0 or tau2 < 0:
        raise ValueError("amplitudes must be nonnegative")
    radius = math.sqrt(tau1**ell.ell2 * tau2**ell.ell1 / ell.g_ell)
    return radius * math.cos(theta), radius * math.sin(theta)


def angles_to_resonant(phi1: float, phi2: float, ell: ResonanceVector) -> tuple[float, float]:
    """``(phi1, phi2) -> (theta, vartheta)``; no reduction mod 2*pi."""
    theta = ell.ell2 * phi1 - ell.ell1 * phi2
    vartheta = ell.m1 * phi1 + ell.m2 * phi2
    return theta, vartheta


def angles_from_resonant(theta: float, vartheta: float, ell: ResonanceVector) -> tuple[float, float]:
    """Inverse of :func:`angles_to_resonant` (the matrix has determinant one)."""
    phi1 = ell.m2 * theta + ell.ell1 * vartheta
    phi2 = -ell.m1 * theta + ell.ell2 * vartheta
    return phi1, phi2


def wrap_angle(x: float | np.ndarray) -> float | np.ndarray:
    """Reduce to ``[0, 2*pi)``."""
    return np.mod(x, 2.0 * np.pi)
