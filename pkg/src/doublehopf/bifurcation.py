"""Hopf lines, resonance droplets and fold-Hopf points.

The Hopf lines are straight lines through ``gamma = 0``; each is active on
the half-line where the equilibrium that bifurcates on it is admissible.
For ``eps > 0`` every interior basis equilibrium with vanishing fibre
frequency opens into a resonance droplet in ``(gamma, xi)``-space whose
saddle-node boundaries are

    xi = xi_center(gamma) +- eps^(|l|-2) |m_t| R(gamma),
    R^2 = sigma1^l2 sigma2^l1 / G.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .equilibria import basis_equilibria, basis_jacobian
from .errors import ConfigError, DomainError, SingularCoefficientsError
from .model import ReducedCoefficients, ScaledParameters, fibre_radius

HOPF_LABELS = ("H_a_0to1", "H_b_0to1", "H_a_1to2", "H_b_1to2", "H_2to3")
_BIFURCATING = {
    "H_a_0to1": "central",
    "H_b_0to1": "central",
    "H_a_1to2": "boundary_a",
    "H_b_1to2": "boundary_b",
    "H_2to3": "interior",
}


@dataclass(frozen=True)
class HopfCurve:
    """The line ``normal[0]*gamma1 + normal[1]*gamma2 = 0``.

    ``direction`` is the unit vector spanning the active half-line, or None
    when the whole line is active.  ``activity`` is ``"line"``, ``"half"`` or
    ``"none"``.
    """

    label: str
    normal: tuple[float, float]
    activity: str
    direction: tuple[float, float] | None

    def __post_init__(self):
        if self.normal[0] == 0 and self.normal[1] == 0:
            raise SingularCoefficientsError(f"{self.label}: vanishing normal")

    def distance(self, gamma) -> float:
        c = np.asarray(self.normal)
        return float(abs(c @ np.asarray(gamma, dtype=float)) / np.hypot(*c))

    def is_active(self, gamma, tol: float = 0.0) -> bool:
        if self.activity == "line":
            return True
        if self.activity == "none":
            return False
        return float(np.dot(self.direction, gamma)) >= -tol

    def slope(self) -> float:
        """``gamma2 / gamma1`` along the line (inf for ``gamma1 = 0``)."""
        c1, c2 = self.normal
        return np.inf if c2 == 0 else -c1 / c2

    def segment(self, window: float) -> np.ndarray:
        """Endpoints of the active part inside the box ``|gamma_j| <= window``."""
        c = np.asarray(self.normal, dtype=float)
        d = np.array([-c[1], c[0]]) / np.hypot(*c)
        t = window / np.abs(d).max()
        if self.activity == "line":
            return np.array([-t * d, t * d])
        if self.activity == "none":
            return np.zeros((0, 2))
        d = np.asarray(self.direction)
        return np.array([np.zeros(2), t * d])


def hopf_curves(coeffs: ReducedCoefficients) -> list[HopfCurve]:
    P = coeffs.P
    if coeffs.det_p() == 0.0:
        raise SingularCoefficientsError("P is singular")
    (p11, p12), (p21, p22) = P
    normals = {
        "H_a_0to1": (1.0, 0.0),
        "H_b_0to1": (0.0, 1.0),
        "H_a_1to2": (p21, -p11),
        "H_b_1to2": (p22, -p12),
        "H_2to3": (p22 * (p21 - p11), p11 * (p12 - p22)),
    }
    curves = []
    for label in HOPF_LABELS:
        c = np.array(normals[label], dtype=float) + 0.0
        d = np.array([-c[1], c[0]]) / np.hypot(*c)
        kind = _BIFURCATING[label]
        sides = [_admissible_at(kind, s * d, coeffs) for s in (1.0, -1.0)]
        if all(sides):
            curves.append(HopfCurve(label, (float(c[0]), float(c[1])), "line", None))
        elif sides[0]:
            curves.append(HopfCurve(label, (float(c[0]), float(c[1])), "half", (float(d[0]), float(d[1]))))
        elif sides[1]:
            curves.append(HopfCurve(label, (float(c[0]), float(c[1])), "half", (float(-d[0]), float(-d[1]))))
        else:
            curves.append(HopfCurve(label, (float(c[0]), float(c[1])), "none", None))
    return curves


def _admissible_at(kind: str, gamma, coeffs: ReducedCoefficients) -> bool:
    params = ScaledParameters(float(gamma[0]), float(gamma[1]))
    rec = next(r for r in basis_equilibria(params, coeffs) if r.kind == kind)
    return rec.admissible


def interior_sigma(gamma, coeffs: ReducedCoefficients, epsilon: float = 0.0) -> np.ndarray:
    """Solve ``gamma + P sigma + eps^2 ptilde(sigma) = 0`` (``-P^-1 gamma`` when ``ptilde = 0``)."""
    gamma = np.asarray(gamma, dtype=float)
    sigma = -coeffs.p_inverse() @ gamma
    if epsilon == 0.0 or len(coeffs.ptilde.powers) == 0:
        return sigma
    e2 = epsilon**2

    def resid(s):
        return gamma + coeffs.P @ s + e2 * coeffs.ptilde(*s)

    sol = optimize.root(resid, sigma, method="hybr", tol=1e-14)
    if np.max(np.abs(resid(sol.x))) > 1e-12 * (1.0 + np.abs(gamma).max()):
        raise DomainError(f"interior equilibrium not found near {sigma}: {sol.message}")
    return sol.x


def h23_frequency(gamma, coeffs: ReducedCoefficients) -> float:
    """Normal frequency ``sqrt(det P * sigma1 * sigma2)`` of the interior equilibrium on H_2to3."""
    sigma = interior_sigma(gamma, coeffs)
    if sigma.min() < -1e-12:
        raise DomainError(f"interior equilibrium {sigma} is not admissible")
    sigma = np.maximum(sigma, 0.0)
    return float(np.sqrt(coeffs.det_p() * sigma[0] * sigma[1]))


TANGENCY_CONVENTIONS = ("derived", "phi", "text")


def tangency_vector(coeffs: ReducedCoefficients, convention: str = "derived") -> np.ndarray:
    """Normal ``m_t`` of the resonance line ``<m_t, psi> + zeta = 0`` at ``eps = 0``.

    ``derived``: ``(B - Q P^-1 A)^T l_perp``, obtained by substituting
    ``sigma = -P^-1 (gamma + eps^k A psi)`` into the frequency isocline.
    ``phi``: ``(B - P^-1 A)^T l_perp`` (drops ``Q``).
    ``text``: ``(B - P A)^T l_perp``.
    All three agree when ``A = 0``; the first two agree when ``Q = I``.
    """
    if convention == "derived":
        M = coeffs.B - coeffs.Q @ coeffs.p_inverse() @ coeffs.A
    elif convention == "phi":
        M = coeffs.B - coeffs.p_inverse() @ coeffs.A
    elif convention == "text":
        M = coeffs.B - coeffs.P @ coeffs.A
    else:
        raise ConfigError(f"unknown tangency convention {convention!r}")
    return M.T @ coeffs.ell.perp


@dataclass(frozen=True)
class DropletSample:
    gamma: tuple[float, float]
    xi_center: float
    half_width: float
    sigma_bar: tuple[float, float]

    @property
    def xi_bounds(self) -> tuple[float, float]:
        return self.xi_center - self.half_width, self.xi_center + self.half_width


def droplet_at_sigma(
    sigma, coeffs: ReducedCoefficients, epsilon: float, convention: str = "derived"
) -> DropletSample:
    """Droplet data over the interior basis point ``sigma`` (``gamma`` follows from it)."""
    s = np.maximum(np.asarray(sigma, dtype=float), 0.0)
    e2 = epsilon**2
    gamma = -coeffs.P @ s - e2 * coeffs.ptilde(*s)
    xi_c = -float(coeffs.ell.perp @ (coeffs.Q @ s + e2 * coeffs.qtilde(*s)))
    m_t = tangency_vector(coeffs, convention)
    k = coeffs.ell.order - 2
    width = epsilon**k * float(np.hypot(*m_t)) * fibre_radius(s[0], s[1], coeffs.ell)
    return DropletSample((float(gamma[0]), float(gamma[1])), xi_c, width, (float(s[0]), float(s[1])))


def droplet_sample(
    gamma, coeffs: ReducedCoefficients, epsilon: float, convention: str = "derived"
) -> DropletSample:
    """Centre and half-width of the droplet section at ``gamma``."""
    if epsilon < 0:
        raise ConfigError("epsilon must be nonnegative")
    sigma = interior_sigma(gamma, coeffs, epsilon)
    if sigma.min() < -1e-12:
        raise DomainError(f"interior equilibrium {sigma} is not admissible at gamma = {tuple(gamma)}")
    out = droplet_at_sigma(sigma, coeffs, epsilon, convention)
    return DropletSample((float(gamma[0]), float(gamma[1])), out.xi_center, out.half_width, out.sigma_bar)


def equilibria_on_circle(R: float, m_t, zeta: float, tol: float = 1e-13) -> list[np.ndarray]:
    """Intersections of ``<m_t, psi> + zeta = 0`` with ``|psi| = R``.

    Returns zero, one (tangency, within relative ``tol``) or two points.
    """
    m_t = np.asarray(m_t, dtype=float)
    norm = float(np.hypot(*m_t))
    if norm == 0.0:
        raise DomainError("degenerate resonance line: m_t = 0")
    if R < 0:
        raise DomainError("circle radius must be nonnegative")
    foot = -zeta * m_t / norm**2
    gap = abs(zeta) - norm * R
    if abs(gap) <= tol * max(1.0, norm * R):
        return [foot]
    if gap > 0:
        return []
    h = np.sqrt(R**2 - (zeta / norm) ** 2)
    t = np.array([-m_t[1], m_t[0]]) / norm
    return [foot + h * t, foot - h * t]


def tangency_curvature(R: float, m_t, zeta: float) -> float:
    """Second derivative in the circle angle of ``<m_t, psi> + zeta`` at the contact point.

    Nonzero value means quadratic (nondegenerate) contact.
    """
    pts = equilibria_on_circle(R, m_t, zeta)
    if len(pts) != 1:
        raise DomainError("line is not tangent to the circle")
    return -float(np.dot(m_t, pts[0]))


@dataclass
class SectionResult:
    """Sampled droplet boundary in one section.

    ``boundary`` is a closed polyline: ``(gamma2, xi)`` pairs for a
    ``gamma1`` section, ``(gamma1, gamma2)`` pairs for a ``xi`` section.
    """

    section: str
    value: float
    epsilon: float
    samples: list[DropletSample]
    boundary: np.ndarray
    upper: list[DropletSample] = field(default_factory=list)
    lower: list[DropletSample] = field(default_factory=list)


def _clustered(n: int) -> np.ndarray:
    """``n`` points in ``[0, 1]`` clustered at both ends."""
    k = np.arange(n)
    return 0.5 * (1.0 - np.cos(np.pi * k / max(n - 1, 1)))


def admissible_gamma2_interval(gamma1: float, coeffs: ReducedCoefficients) -> tuple[float, float] | None:
    """Range of ``gamma2`` on which the interior equilibrium is admissible at fixed ``gamma1``."""
    Pinv = coeffs.p_inverse()
    # sigma = -Pinv @ (gamma1, gamma2) = a + b * gamma2
    a = -Pinv[:, 0] * gamma1
    b = -Pinv[:, 1]
    lo, hi = -np.inf, np.inf
    for aj, bj in zip(a, b):
        if bj == 0:
            if aj < 0:
                return None
            continue
        root = -aj / bj
        if bj > 0:
            lo = max(lo, root)
        else:
            hi = min(hi, root)
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        return None
    return float(lo), float(hi)


def droplet_section(
    section: str,
    value: float,
    coeffs: ReducedCoefficients,
    epsilon: float,
    n: int = 401,
    convention: str = "derived",
    radius_max: float = 4.0,
) -> SectionResult:
    """Sample the droplet boundary in a vertical (``section="gamma1"``) or
    horizontal (``section="xi"``) section."""
    if n < 2:
        raise ConfigError("section grid needs at least two points")
    if section == "gamma1":
        return _vertical_section(value, coeffs, epsilon, n, convention)
    if section == "xi":
        return _horizontal_section(value, coeffs, epsilon, n, convention, radius_max)
    raise ConfigError(f"unknown section {section!r}; use 'gamma1' or 'xi'")


def _vertical_section(gamma1, coeffs, epsilon, n, convention) -> SectionResult:
    interval = admissible_gamma2_interval(gamma1, coeffs)
    samples: list[DropletSample] = []
    if interval is not None:
        lo, hi = interval
        for s in _clustered(n):
            g2 = lo + s * (hi - lo)
            try:
                samples.append(droplet_sample((gamma1, g2), coeffs, epsilon, convention))
            except DomainError:
                continue
    upper = [(d.gamma[1], d.xi_center + d.half_width) for d in samples]
    lower = [(d.gamma[1], d.xi_center - d.half_width) for d in samples]
    boundary = np.array(upper + lower[::-1] + upper[:1]) if samples else np.zeros((0, 2))
    return SectionResult("gamma1", gamma1, epsilon, samples, boundary, samples, samples)


def _horizontal_section(xi, coeffs, epsilon, n, convention, radius_max) -> SectionResult:
    angles = 0.5 * np.pi * _clustered(n)
    radii = np.geomspace(1e-6, radius_max, 400)
    branches: dict[int, list[DropletSample]] = {1: [], -1: []}
    for a in angles:
        u = np.array([np.cos(a), np.sin(a)])
        for sign in (1, -1):

            def f(r, sign=sign):
                d = droplet_at_sigma(r * u, coeffs, epsilon, convention)
                return d.xi_center + sign * d.half_width - xi

            vals = np.array([f(r) for r in radii])
            idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
            if len(idx) == 0:
                continue
            i = idx[0]
            if vals[i] == 0.0:
                r = radii[i]
            else:
                r = optimize.brentq(f, radii[i], radii[i + 1], xtol=1e-15, rtol=1e-15)
            branches[sign].append(droplet_at_sigma(r * u, coeffs, epsilon, convention))
    upper, lower = branches[1], branches[-1]
    pts = [d.gamma for d in upper] + [d.gamma for d in lower[::-1]]
    if pts:
        pts.append(pts[0])
    boundary = np.array(pts) if pts else np.zeros((0, 2))
    return SectionResult("xi", xi, epsilon, upper + lower, boundary, upper, lower)


PINCH_WINDOW = (1e-6, 1e-4)


def fit_pinch_exponent(
    samples: list[DropletSample], end: int, window: tuple[float, float] = PINCH_WINDOW
) -> float:
    """Least-squares slope of ``log half_width`` against ``log sigma_bar[end]``
    over samples with ``sigma_bar[end]`` inside ``window``.

    The other amplitude still varies linearly across the window, which
    biases the slope by O(window[1]); hence the small default window.
    """
    s = np.array([d.sigma_bar[end] for d in samples])
    w = np.array([d.half_width for d in samples])
    sel = (s >= window[0]) & (s <= window[1]) & (w > 0)
    if sel.sum() < 3:
        raise DomainError(f"only {int(sel.sum())} samples inside the fit window")
    slope, _ = np.polyfit(np.log(s[sel]), np.log(w[sel]), 1)
    return float(slope)


@dataclass(frozen=True)
class FoldHopfPoint:
    gamma: tuple[float, float]
    xi: float
    sample: DropletSample

    @property
    def residual(self) -> float:
        """``|xi - xi_center| - half_width``; zero on the droplet boundary."""
        return abs(self.xi - self.sample.xi_center) - self.sample.half_width


def _h23(coeffs) -> HopfCurve:
    return next(c for c in hopf_curves(coeffs) if c.label == "H_2to3")


def fold_hopf_points(
    coeffs: ReducedCoefficients,
    epsilon: float,
    section: str,
    value: float,
    convention: str = "derived",
    t_max: float | None = None,
    n_scan: int = 4000,
) -> list[FoldHopfPoint]:
    """The two points where ``H_2to3`` meets the droplet boundary in a section.

    In a ``gamma1`` section ``H_2to3`` is a single ``gamma2`` and the points
    are ``xi_center +- half_width`` there.  In a ``xi`` section the active
    half-line ``gamma = t d`` is scanned for the two boundary crossings that
    enclose the droplet centre, each refined by bisection.
    """
    h23 = _h23(coeffs)
    if h23.activity == "none":
        return []
    if section == "gamma1":
        c1, c2 = h23.normal
        if c2 == 0:
            return []
        gamma = np.array([value, -c1 * value / c2])
        if not h23.is_active(gamma):
            return []
        try:
            d = droplet_sample(gamma, coeffs, epsilon, convention)
        except DomainError:
            return []
        g = (float(gamma[0]), float(gamma[1]))
        return [FoldHopfPoint(g, d.xi_center - d.half_width, d), FoldHopfPoint(g, d.xi_center + d.half_width, d)]
    if section != "xi":
        raise ConfigError(f"unknown section {section!r}")

    direction = np.asarray(h23.direction if h23.direction is not None else (-1.0, 0.0))
    xi = value

    def gap(t):
        d = droplet_sample(t * direction, coeffs, epsilon, convention)
        return abs(xi - d.xi_center) - d.half_width

    def offset(t):
        return abs(xi - droplet_sample(t * direction, coeffs, epsilon, convention).xi_center)

    if t_max is None:
        unit = droplet_sample(direction, coeffs, 0.0, convention)
        t_max = 4.0 * max(abs(xi) / max(abs(unit.xi_center), 1e-300), 1.0)
        t_max = min(t_max, 1e6)
    ts = np.linspace(t_max / n_scan, t_max, n_scan)
    vals = np.array([gap(t) for t in ts])
    centre = int(np.argmin([offset(t) for t in ts]))
    if vals[centre] > 0:
        return []
    below = np.nonzero((vals[:centre] > 0))[0]
    above = np.nonzero((vals[centre:] > 0))[0]
    if len(below) == 0 or len(above) == 0:
        return []
    i = below[-1]
    j = centre + above[0]
    roots = [
        optimize.brentq(gap, ts[i], ts[i + 1], xtol=1e-15, rtol=1e-15),
        optimize.brentq(gap, ts[j - 1], ts[j], xtol=1e-15, rtol=1e-15),
    ]
    out = []
    for t in roots:
        gamma = t * direction
        d = droplet_sample(gamma, coeffs, epsilon, convention)
        out.append(FoldHopfPoint((float(gamma[0]), float(gamma[1])), xi, d))
    return out


@dataclass(frozen=True)
class RefinedDroplet:
    gamma: tuple[float, float]
    xi_lower: float
    xi_upper: float

    @property
    def xi_center(self) -> float:
        return 0.5 * (self.xi_lower + self.xi_upper)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.xi_upper - self.xi_lower)


def refine_droplet(
    gamma, coeffs: ReducedCoefficients, epsilon: float, n_angles: int = 256, tol: float = 1e-12
) -> RefinedDroplet:
    """Droplet boundary at ``gamma`` from the full equilibrium equations.

    Equilibria with interior ``sigma`` sit on the fibre circle at some angle
    ``phi``.  For each ``phi`` the amplitude isocline is solved for
    ``sigma``; the frequency isocline then fixes ``xi(phi)``.  The
    saddle-node values of ``xi`` are the extrema of ``xi(phi)``.
    """
    gamma = np.asarray(gamma, dtype=float)
    ell = coeffs.ell
    e2 = epsilon**2
    ek = epsilon ** (ell.order - 2)
    seed = interior_sigma(gamma, coeffs, epsilon)
    if seed.min() <= 0:
        raise DomainError(f"interior equilibrium {seed} is not strictly admissible")

    def solve_sigma(phi, start):
        e = np.array([np.cos(phi), np.sin(phi)])

        def resid(s):
            r = fibre_radius(max(s[0], 0.0), max(s[1], 0.0), ell)
            return gamma + coeffs.P @ s + e2 * coeffs.ptilde(*s) + ek * r * (coeffs.A @ e)

        sol = optimize.root(resid, start, method="hybr", tol=tol * 1e-2)
        # hybr flags "no further improvement" even at machine-precision residuals
        if np.max(np.abs(resid(sol.x))) > tol:
            raise DomainError(f"amplitude isocline did not converge at phi = {phi}")
        return sol.x

    def xi_of(phi, start=seed):
        s = solve_sigma(phi, start)
        psi = fibre_radius(s[0], s[1], ell) * np.array([np.cos(phi), np.sin(phi)])
        u = coeffs.Q @ s + e2 * coeffs.qtilde(*s) + ek * (coeffs.B @ psi)
        return -float(ell.perp @ u)

    phis = np.linspace(0.0, 2 * np.pi, n_angles, endpoint=False)
    vals = np.array([xi_of(p) for p in phis])
    step = phis[1] - phis[0]
    i_max, i_min = int(np.argmax(vals)), int(np.argmin(vals))
    opt = dict(xatol=1e-13, maxiter=500)
    hi = optimize.minimize_scalar(
        lambda p: -xi_of(p), bounds=(phis[i_max] - step, phis[i_max] + step), method="bounded", options=opt
    )
    lo = optimize.minimize_scalar(
        xi_of, bounds=(phis[i_min] - step, phis[i_min] + step), method="bounded", options=opt
    )
    return RefinedDroplet((float(gamma[0]), float(gamma[1])), float(lo.fun), float(-hi.fun))


def on_curve_check(curve: HopfCurve, gamma, coeffs: ReducedCoefficients) -> dict:
    """Jacobian data of the equilibrium that bifurcates on ``curve`` at ``gamma``."""
    params = ScaledParameters(float(gamma[0]), float(gamma[1]))
    rec = next(r for r in basis_equilibria(params, coeffs) if r.kind == _BIFURCATING[curve.label])
    J = basis_jacobian(rec.sigma_bar, params, coeffs)
    return {
        "sigma_bar": rec.sigma_bar,
        "admissible": rec.admissible,
        "trace": float(np.trace(J)),
        "det": float(np.linalg.det(J)),
        "min_abs_real": float(np.min(np.abs(np.linalg.eigvals(J).real))),
        "diag": (float(J[0, 0]), float(J[1, 1])),
    }
