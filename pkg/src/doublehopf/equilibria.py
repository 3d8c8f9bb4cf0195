"""Equilibria of the Lotka-Volterra basis dynamics and their stability."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParameterError, SingularCoefficientsError
from .model import ReducedCoefficients, ScaledParameters

KINDS = ("central", "boundary_a", "boundary_b", "interior")
ADMISSIBLE_TOL = 1e-12
STABILITY_TOL = 1e-9


@dataclass(frozen=True)
class EquilibriumRecord:
    kind: str
    sigma_bar: tuple[float, float]
    admissible: bool
    eigenvalues: tuple[complex, complex]
    stability: str

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "sigma_bar": [float(x) for x in self.sigma_bar],
            "admissible": self.admissible,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "stability": self.stability,
        }


def basis_jacobian(sigma_bar, params: ScaledParameters, coeffs: ReducedCoefficients) -> np.ndarray:
    """Linearisation of ``diag(gamma + P sigma) sigma`` at ``sigma_bar``.

    This is half the derivative of :func:`~doublehopf.model.basis_field`; the
    factor two only rescales time and leaves stability unchanged.
    """
    s1, s2 = (float(x) for x in sigma_bar)
    g1, g2 = params.gamma1, params.gamma2
    (p11, p12), (p21, p22) = coeffs.P
    return np.array(
        [
            [g1 + 2 * p11 * s1 + p12 * s2, p12 * s1],
            [p21 * s2, g2 + p21 * s1 + 2 * p22 * s2],
        ]
    )


def eigenvalues_2x2(J) -> tuple[complex, complex]:
    """Eigenvalues of a real 2x2 matrix from trace and determinant, sorted by (re, im)."""
    (a, b), (c, d) = np.asarray(J, dtype=float)
    half_tr = 0.5 * (a + d)
    disc = 0.25 * (a - d) ** 2 + b * c
    if disc >= 0:
        r = np.sqrt(disc)
        # avoid cancellation in the smaller root
        big = half_tr + np.copysign(r, half_tr) if half_tr != 0 else r
        det = a * d - b * c
        small = det / big if big != 0 else half_tr - r
        lo, hi = sorted((float(big), float(small)))
        return complex(lo), complex(hi)
    r = np.sqrt(-disc)
    return complex(half_tr, -r), complex(half_tr, r)


def classify_stability(J, tol: float = STABILITY_TOL) -> str:
    J = np.asarray(J, dtype=float)
    tr = J[0, 0] + J[1, 1]
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    lo, hi = (z.real for z in eigenvalues_2x2(J))
    if hi < -tol:
        return "attractor"
    if lo > tol:
        return "repeller"
    if lo < -tol and hi > tol:
        return "saddle"
    if abs(tr) <= tol and det > tol:
        return "center"
    return "degenerate"


def _candidates(params: ScaledParameters, coeffs: ReducedCoefficients):
    P = coeffs.P
    if coeffs.det_p() == 0.0:
        raise SingularCoefficientsError("P is singular")
    g1, g2 = params.gamma1, params.gamma2
    a = (-g1 / P[0, 0], 0.0) if P[0, 0] != 0 else (np.nan, 0.0)
    b = (0.0, -g2 / P[1, 1]) if P[1, 1] != 0 else (0.0, np.nan)
    interior = -coeffs.p_inverse() @ params.gamma
    return [(0.0, 0.0), a, b, (float(interior[0]), float(interior[1]))]


def basis_equilibria(params: ScaledParameters, coeffs: ReducedCoefficients) -> list[EquilibriumRecord]:
    """The four candidate equilibria, in the order central, boundary_a, boundary_b, interior."""
    records = []
    for kind, sb in zip(KINDS, _candidates(params, coeffs)):
        sb = (float(sb[0]) + 0.0, float(sb[1]) + 0.0)
        admissible = bool(np.all(np.isfinite(sb)) and min(sb) >= -ADMISSIBLE_TOL)
        if np.all(np.isfinite(sb)):
            J = basis_jacobian(sb, params, coeffs)
            ev = eigenvalues_2x2(J)
            stab = classify_stability(J)
        else:
            ev = (complex(np.nan), complex(np.nan))
            stab = "degenerate"
        records.append(EquilibriumRecord(kind, sb, admissible, ev, stab))
    return records


def fiber_frequency(sigma_bar, params: ScaledParameters, coeffs: ReducedCoefficients) -> float:
    """``xi + <l_perp, Q sigma_bar>``; zero marks a circle of equilibria."""
    return float(params.xi + coeffs.ell.perp @ (coeffs.Q @ np.asarray(sigma_bar, dtype=float)))


@dataclass(frozen=True)
class RegionSignature:
    entries: tuple[tuple[str, str], ...]

    def __str__(self) -> str:
        return "{" + ", ".join(f"{k}: {s}" for k, s in self.entries) + "}"

    def as_dict(self) -> dict[str, str]:
        return dict(self.entries)


def on_bifurcation_set(
    params: ScaledParameters, coeffs: ReducedCoefficients, tol: float = 1e-9, curves=None
) -> bool:
    """True when ``gamma`` lies on an active Hopf line (or at the origin).

    ``curves`` may pass a precomputed ``hopf_curves(coeffs)`` for scans.
    """
    if curves is None:
        from .bifurcation import hopf_curves

        curves = hopf_curves(coeffs)
    g = params.gamma
    scale = 1.0 + np.abs(g).max()
    for curve in curves:
        if curve.distance(g) <= tol * scale and curve.is_active(g, tol * scale):
            return True
    return False


def classify_region(
    params: ScaledParameters, coeffs: ReducedCoefficients, tol: float = 1e-9, curves=None
) -> RegionSignature:
    if on_bifurcation_set(params, coeffs, tol, curves):
        raise DegenerateParameterError(
            f"gamma = ({params.gamma1}, {params.gamma2}) lies on a bifurcation line"
        )
    entries = tuple(
        (r.kind, r.stability) for r in basis_equilibria(params, coeffs) if r.admissible
    )
    return RegionSignature(entries)
