"""Coefficients of the truncated normal form and the reduced vector field.

After the blow-up ``tau_j = eps^2 sigma_j``, ``tau_{j+2} = eps^|l| psi_j``,
``beta_j = eps^2 gamma_j``, ``delta_j = eps^2 eta_j`` the truncated normal
form reduces to

    sigma' = 2 diag(v) sigma,
    psi'   = [[s, -w], [w, s]] psi,

with ``v = gamma + P sigma + eps^2 ptilde(sigma) + eps^(|l|-2) A psi``,
``s = <l_star, v>`` and
``w = xi + <l_perp, Q sigma + eps^2 qtilde(sigma) + eps^(|l|-2) B psi>``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import jsonschema
import numpy as np
from numba import njit

from .errors import ConfigError, SingularCoefficientsError
from .invariants import ResonanceVector, make_resonance


# ---------------------------------------------------------------------------
# polynomial maps


@dataclass(frozen=True, eq=False)
class PolyMap:
    """Dense polynomial map ``(x1, x2) -> R^dim`` given by monomial terms.

    ``powers[k] = (i, j)`` and ``values[k]`` is the vector coefficient of
    ``x1**i * x2**j``.
    """

    powers: np.ndarray  # (k, 2) int
    values: np.ndarray  # (k, dim) float
    dim: int = 2

    @classmethod
    def zero(cls, dim: int = 2) -> "PolyMap":
        return cls(np.zeros((0, 2), dtype=np.int64), np.zeros((0, dim)), dim)

    @classmethod
    def from_terms(cls, terms: list[Mapping[str, Any]], dim: int = 2) -> "PolyMap":
        if not terms:
            return cls.zero(dim)
        powers = np.array([t["powers"] for t in terms], dtype=np.int64).reshape(-1, 2)
        values = np.array([t["value"] for t in terms], dtype=float).reshape(-1, dim)
        if np.any(powers < 0):
            raise ConfigError("polynomial powers must be nonnegative")
        return cls(powers, values, dim)

    def __call__(self, x1: float, x2: float) -> np.ndarray:
        out = np.zeros(self.dim)
        for (i, j), c in zip(self.powers, self.values):
            out += c * (x1**i * x2**j)
        return out

    def vanishes_at_origin(self) -> bool:
        const = np.all(self.powers == 0, axis=1)
        return bool(np.all(self.values[const] == 0.0))

    def to_terms(self) -> list[dict]:
        return [
            {"powers": [int(i), int(j)], "value": [float(x) for x in c]}
            for (i, j), c in zip(self.powers, self.values)
        ]


# ---------------------------------------------------------------------------
# parameter and coefficient records


@dataclass(frozen=True)
class UnfoldingParameters:
    """Versal unfolding ``mu = (delta1, delta2, beta1, beta2)`` plus ``alpha(0)``."""

    beta1: float
    beta2: float
    delta1: float
    delta2: float
    alpha0: tuple[float, float] = (1.0, 2.0)

    def __post_init__(self):
        if not (self.alpha0[0] > 0 and self.alpha0[1] > 0):
            raise ConfigError("normal frequencies alpha(0) must be positive")


@dataclass(frozen=True)
class ScaledParameters:
    """Blown-up parameters ``(gamma1, gamma2, xi, epsilon)``.

    ``eta`` keeps both scaled detunings when the record was produced by
    :func:`scale_parameters`; only their combination ``xi`` enters the
    dynamics.
    """

    gamma1: float
    gamma2: float
    xi: float = 0.0
    epsilon: float = 0.0
    eta: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ConfigError(f"epsilon must be nonnegative, got {self.epsilon}")

    @property
    def gamma(self) -> np.ndarray:
        return np.array([self.gamma1, self.gamma2])

    def with_gamma(self, gamma) -> "ScaledParameters":
        return ScaledParameters(float(gamma[0]), float(gamma[1]), self.xi, self.epsilon)


@dataclass(frozen=True)
class Driving:
    """Torus-phase driving ``x' = omega + fhat(tau1, tau2) + a0 tau3 + c0 tau4``."""

    omega: np.ndarray
    fhat: PolyMap
    a0: np.ndarray
    c0: np.ndarray

    @property
    def n(self) -> int:
        return len(self.omega)


@dataclass(frozen=True, eq=False)
class ReducedCoefficients:
    """Everything the truncated normal form provides, frozen at ``mu = 0``."""

    P: np.ndarray
    Q: np.ndarray
    A: np.ndarray
    B: np.ndarray
    ell: ResonanceVector
    ptilde: PolyMap = field(default_factory=PolyMap.zero)
    qtilde: PolyMap = field(default_factory=PolyMap.zero)
    driving: Driving | None = None

    def __post_init__(self):
        for name in "PQAB":
            mat = np.asarray(getattr(self, name), dtype=float)
            if mat.shape != (2, 2):
                raise ConfigError(f"{name} must be 2x2, got shape {mat.shape}")
            object.__setattr__(self, name, mat)
        for name in ("ptilde", "qtilde"):
            poly = getattr(self, name)
            if poly.dim != 2:
                raise ConfigError(f"{name} must map into R^2")
            if not poly.vanishes_at_origin():
                raise ConfigError(f"{name} must vanish at the origin")
        flags = self.genericity()
        if not all(flags.values()):
            bad = ", ".join(k for k, v in flags.items() if not v)
            warnings.warn(f"coefficients violate genericity assumptions: {bad}", stacklevel=3)

    def genericity(self) -> dict[str, bool]:
        P = self.P
        return {
            "p11>0": bool(P[0, 0] > 0),
            "p22<0": bool(P[1, 1] < 0),
            "detP>0": bool(np.linalg.det(P) > 0),
        }

    def det_p(self) -> float:
        P = self.P
        return float(P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0])

    def p_inverse(self) -> np.ndarray:
        det = self.det_p()
        if det == 0.0:
            raise SingularCoefficientsError("P is singular")
        P = self.P
        return np.array([[P[1, 1], -P[0, 1]], [-P[1, 0], P[0, 0]]]) / det


PAPER_P = ((0.5, 3.0), (-1.0, -1.0))


def example_coefficients(ell=(1, 2), P=PAPER_P, Q=None, A=None, B=None) -> ReducedCoefficients:
    """The worked example: P from the Hopf-diagram figure, Q = B = I, A = 0."""
    eye = np.eye(2)
    return ReducedCoefficients(
        P=np.array(P, dtype=float),
        Q=eye if Q is None else np.array(Q, dtype=float),
        A=np.zeros((2, 2)) if A is None else np.array(A, dtype=float),
        B=eye if B is None else np.array(B, dtype=float),
        ell=make_resonance(*ell),
    )


# ---------------------------------------------------------------------------
# scaling


def scale_parameters(u: UnfoldingParameters, epsilon: float, ell: ResonanceVector) -> ScaledParameters:
    if not epsilon > 0:
        raise ZeroDivisionError("scaling requires epsilon > 0")
    e2 = epsilon * epsilon
    eta = (u.delta1 / e2, u.delta2 / e2)
    xi = ell.ell2 * eta[0] - ell.ell1 * eta[1]
    return ScaledParameters(u.beta1 / e2, u.beta2 / e2, xi, epsilon, eta)


def unscale_parameters(
    p: ScaledParameters, alpha0: tuple[float, float] = (1.0, 2.0)
) -> UnfoldingParameters:
    if p.eta is None:
        raise ConfigError("unscaling needs both detunings eta; xi alone is not invertible")
    e2 = p.epsilon * p.epsilon
    return UnfoldingParameters(p.gamma1 * e2, p.gamma2 * e2, p.eta[0] * e2, p.eta[1] * e2, alpha0)


def omega_matrix(u: UnfoldingParameters) -> np.ndarray:
    """Linear part: 2x2 rotation-scaling blocks with eigenvalues ``beta_j +- i alpha_j``."""
    out = np.zeros((4, 4))
    for j, (beta, delta) in enumerate(((u.beta1, u.delta1), (u.beta2, u.delta2))):
        alpha = u.alpha0[j] + delta
        out[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = [[beta, -alpha], [alpha, beta]]
    return out


# ---------------------------------------------------------------------------
# reduced state and field


@dataclass(frozen=True)
class ReducedState:
    sigma1: float
    sigma2: float
    psi1: float
    psi2: float

    @property
    def sigma(self) -> np.ndarray:
        return np.array([self.sigma1, self.sigma2])

    @property
    def psi(self) -> np.ndarray:
        return np.array([self.psi1, self.psi2])

    def as_array(self) -> np.ndarray:
        return np.array([self.sigma1, self.sigma2, self.psi1, self.psi2])

    @classmethod
    def from_array(cls, y) -> "ReducedState":
        return cls(float(y[0]), float(y[1]), float(y[2]), float(y[3]))

    @classmethod
    def on_variety(cls, sigma1: float, sigma2: float, theta: float, ell: ResonanceVector) -> "ReducedState":
        """State on the fibre over ``sigma`` at resonant angle ``theta``."""
        r = fibre_radius(sigma1, sigma2, ell)
        return cls(sigma1, sigma2, r * np.cos(theta), r * np.sin(theta))


def fibre_radius(sigma1: float, sigma2: float, ell: ResonanceVector) -> float:
    return float(np.sqrt(sigma1**ell.ell2 * sigma2**ell.ell1 / ell.g_ell))


def state_residual(state: ReducedState, ell: ResonanceVector) -> float:
    return state.sigma1**ell.ell2 * state.sigma2**ell.ell1 - ell.g_ell * (state.psi1**2 + state.psi2**2)


def tau_from_state(state: ReducedState, epsilon: float, ell: ResonanceVector) -> np.ndarray:
    """Undo the blow-up: ``(eps^2 sigma, eps^|l| psi)``."""
    e2 = epsilon * epsilon
    el = epsilon**ell.order
    return np.array([e2 * state.sigma1, e2 * state.sigma2, el * state.psi1, el * state.psi2])


@njit(cache=True)
def _poly_eval(powers, values, x1, x2):
    out0 = 0.0
    out1 = 0.0
    for k in range(powers.shape[0]):
        mono = x1 ** powers[k, 0] * x2 ** powers[k, 1]
        out0 += values[k, 0] * mono
        out1 += values[k, 1] * mono
    return out0, out1


@njit(cache=True)
def field_kernel(y, out, sign, g1, g2, xi, eps, P, Q, A, B, l1, l2, pp, pv, qp, qv):
    """Write ``sign * F(y)`` into ``out``; ``y = (sigma1, sigma2, psi1, psi2)``."""
    s1 = y[0]
    s2 = y[1]
    f1 = y[2]
    f2 = y[3]
    e2 = eps * eps
    ek = eps ** (l1 + l2 - 2)
    pt0, pt1 = _poly_eval(pp, pv, s1, s2)
    qt0, qt1 = _poly_eval(qp, qv, s1, s2)
    v1 = g1 + P[0, 0] * s1 + P[0, 1] * s2 + e2 * pt0 + ek * (A[0, 0] * f1 + A[0, 1] * f2)
    v2 = g2 + P[1, 0] * s1 + P[1, 1] * s2 + e2 * pt1 + ek * (A[1, 0] * f1 + A[1, 1] * f2)
    u1 = Q[0, 0] * s1 + Q[0, 1] * s2 + e2 * qt0 + ek * (B[0, 0] * f1 + B[0, 1] * f2)
    u2 = Q[1, 0] * s1 + Q[1, 1] * s2 + e2 * qt1 + ek * (B[1, 0] * f1 + B[1, 1] * f2)
    s = l2 * v1 + l1 * v2
    w = xi + l2 * u1 - l1 * u2
    out[0] = sign * 2.0 * v1 * s1
    out[1] = sign * 2.0 * v2 * s2
    out[2] = sign * (s * f1 - w * f2)
    out[3] = sign * (w * f1 + s * f2)


def kernel_args(params: ScaledParameters, coeffs: ReducedCoefficients) -> tuple:
    """Positional arguments of :func:`field_kernel` after ``(y, out, sign)``."""
    return (
        float(params.gamma1),
        float(params.gamma2),
        float(params.xi),
        float(params.epsilon),
        coeffs.P,
        coeffs.Q,
        coeffs.A,
        coeffs.B,
        float(coeffs.ell.ell1),
        float(coeffs.ell.ell2),
        coeffs.ptilde.powers.astype(np.float64),
        coeffs.ptilde.values,
        coeffs.qtilde.powers.astype(np.float64),
        coeffs.qtilde.values,
    )


def reduced_field(
    state: ReducedState, params: ScaledParameters, coeffs: ReducedCoefficients
) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(dsigma/dt, dpsi/dt)``."""
    out = np.empty(4)
    field_kernel(state.as_array(), out, 1.0, *kernel_args(params, coeffs))
    return out[:2], out[2:]


def basis_field(sigma, params: ScaledParameters, coeffs: ReducedCoefficients) -> np.ndarray:
    """Lotka-Volterra basis dynamics ``2 diag(gamma + P sigma) sigma`` at ``eps = 0``."""
    sigma = np.asarray(sigma, dtype=float)
    return 2.0 * (params.gamma + coeffs.P @ sigma) * sigma


def fibre_rates(state: ReducedState, params: ScaledParameters, coeffs: ReducedCoefficients) -> tuple[float, float]:
    """Return ``(s, w)``: the radial and rotational rates of the fibre block."""
    ell = coeffs.ell
    e2 = params.epsilon**2
    ek = params.epsilon ** (ell.order - 2)
    sigma, psi = state.sigma, state.psi
    v = params.gamma + coeffs.P @ sigma + e2 * coeffs.ptilde(*sigma) + ek * coeffs.A @ psi
    u = coeffs.Q @ sigma + e2 * coeffs.qtilde(*sigma) + ek * coeffs.B @ psi
    return float(ell.star @ v), float(params.xi + ell.perp @ u)


# ---------------------------------------------------------------------------
# JSON documents

_MATRIX = {
    "type": "array",
    "minItems": 2,
    "maxItems": 2,
    "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}},
}


def _poly_schema(dim_items: dict) -> dict:
    return {
        "type": "array",
        "items": {
            "type": "object",
            "required": ["powers", "value"],
            "additionalProperties": False,
            "properties": {
                "powers": {
                    "type": "array",
                    "minItems": 2,
                    "maxItems": 2,
                    "items": {"type": "integer", "minimum": 0},
                },
                "value": dim_items,
            },
        },
    }


_VEC2 = {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}}
_VECN = {"type": "array", "items": {"type": "number"}}

COEFFICIENT_SCHEMA = {
    "type": "object",
    "required": ["ell", "P"],
    "properties": {
        "ell": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "integer"}},
        "P": _MATRIX,
        "Q": _MATRIX,
        "A": _MATRIX,
        "B": _MATRIX,
        "ptilde": _poly_schema(_VEC2),
        "qtilde": _poly_schema(_VEC2),
        "driving": {
            "type": "object",
            "required": ["omega"],
            "additionalProperties": False,
            "properties": {
                "omega": _VECN,
                "fhat": _poly_schema(_VECN),
                "a0": _VECN,
                "c0": _VECN,
            },
        },
    },
}


def coefficients_from_dict(doc: Mapping[str, Any]) -> ReducedCoefficients:
    """Build coefficients from a parsed JSON document (validated first).

    ``Q`` and ``B`` default to the identity and ``A`` to zero.
    """
    try:
        jsonschema.validate(doc, COEFFICIENT_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid coefficient document: {exc.message}") from exc
    ell = make_resonance(*doc["ell"])
    driving = None
    if "driving" in doc:
        d = doc["driving"]
        omega = np.array(d["omega"], dtype=float)
        n = len(omega)
        fhat = PolyMap.from_terms(d.get("fhat", []), dim=n)
        a0 = np.array(d.get("a0", [0.0] * n), dtype=float)
        c0 = np.array(d.get("c0", [0.0] * n), dtype=float)
        if a0.shape != (n,) or c0.shape != (n,) or fhat.values.shape[1] != n:
            raise ConfigError("driving vectors must all have length len(omega)")
        if not fhat.vanishes_at_origin():
            raise ConfigError("fhat must vanish at the origin")
        driving = Driving(omega, fhat, a0, c0)
    return ReducedCoefficients(
        P=np.array(doc["P"], dtype=float),
        Q=np.array(doc.get("Q", np.eye(2)), dtype=float),
        A=np.array(doc.get("A", np.zeros((2, 2))), dtype=float),
        B=np.array(doc.get("B", np.eye(2)), dtype=float),
        ell=ell,
        ptilde=PolyMap.from_terms(doc.get("ptilde", [])),
        qtilde=PolyMap.from_terms(doc.get("qtilde", [])),
        driving=driving,
    )


def load_coefficients(path: str | Path) -> ReducedCoefficients:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"coefficient file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    return coefficients_from_dict(doc)


def coefficients_to_dict(coeffs: ReducedCoefficients) -> dict:
    doc = {
        "ell": [coeffs.ell.ell1, coeffs.ell.ell2],
        "P": coeffs.P.tolist(),
        "Q": coeffs.Q.tolist(),
        "A": coeffs.A.tolist(),
        "B": coeffs.B.tolist(),
        "ptilde": coeffs.ptilde.to_terms(),
        "qtilde": coeffs.qtilde.to_terms(),
    }
    if coeffs.driving is not None:
        d = coeffs.driving
        doc["driving"] = {
            "omega": d.omega.tolist(),
            "fhat": d.fhat.to_terms(),
            "a0": d.a0.tolist(),
            "c0": d.c0.tolist(),
        }
    return doc
