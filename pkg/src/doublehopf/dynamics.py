"""Trajectories of the reduced field on the reduced phase space.

Integration uses the Dormand-Prince 5(4) pair with PI step-size control.
The syzygy is not enforced; its drift along the trajectory is recorded as
a quality measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.integrate import cumulative_trapezoid, trapezoid

from .errors import ConfigError, DivergenceError, DomainError, IntegrationError, StiffnessError
from .model import (
    ReducedCoefficients,
    ReducedState,
    ScaledParameters,
    fibre_rates,
    field_kernel,
    kernel_args,
    tau_from_state,
)

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array(
    [
        [0, 0, 0, 0, 0, 0],
        [1 / 5, 0, 0, 0, 0, 0],
        [3 / 40, 9 / 40, 0, 0, 0, 0],
        [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
        [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
    ]
)
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_E = np.array([71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

SAFETY = 0.9
INITIAL_STEP = 1e-3
_BETA = 0.04
_EXPO = 0.2 - 0.75 * _BETA

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_NONFINITE = 2
STATUS_UNDERSHOOT = 3
STATUS_MAXSTEPS = 4


@njit(cache=True)
def _stages(y, h, k, ytmp, sign, g1, g2, xi, eps, P, Q, A, B, l1, l2, pp, pv, qp, qv):
    """Fill stages ``k[1..6]`` given ``k[0] = F(y)``; return the 5th-order update."""
    for s in range(1, 7):
        for i in range(4):
            acc = 0.0
            for j in range(s):
                acc += _A[s, j] * k[j, i]
            ytmp[i] = y[i] + h * acc
        field_kernel(ytmp, k[s], sign, g1, g2, xi, eps, P, Q, A, B, l1, l2, pp, pv, qp, qv)
    # ytmp holds the 5th-order solution (row 6 of the tableau equals B5)
    return ytmp


@njit(cache=True)
def _dopri(y0, t_end, rtol, atol, h0, max_steps, sign, g1, g2, xi, eps, P, Q, A, B, l1, l2, pp, pv, qp, qv):
    cap = 1024
    ts = np.empty(cap)
    ys = np.empty((cap, 4))
    k = np.empty((7, 4))
    ytmp = np.empty(4)
    ynew = np.empty(4)
    y = y0.copy()
    ts[0] = 0.0
    ys[0] = y
    n = 1
    t = 0.0
    h = min(h0, t_end)
    err_old = 1e-4
    accepted = 0
    rejected = 0
    status = 0
    field_kernel(y, k[0], sign, g1, g2, xi, eps, P, Q, A, B, l1, l2, pp, pv, qp, qv)
    steps = 0
    while t < t_end:
        steps += 1
        if steps > max_steps:
            status = 4
            break
        if t + h > t_end:
            h = t_end - t
        if h <= 1e-14 * max(abs(t), 1.0):
            status = 1
            break
        _stages(y, h, k, ytmp, sign, g1, g2, xi, eps, P, Q, A, B, l1, l2, pp, pv, qp, qv)
        for i in range(4):
            ynew[i] = ytmp[i]
        err = 0.0
        finite = True
        for i in range(4):
            e = 0.0
            for j in range(7):
                e += _E[j] * k[j, i]
            e *= h
            sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            err += (e / sc) ** 2
            if not np.isfinite(ynew[i]):
                finite = False
        err = np.sqrt(err / 4.0)
        if not finite or not np.isfinite(err):
            if h < 1e-12:
                status = 2
                break
            h *= 0.1
            rejected += 1
            continue
        fac11 = err**_EXPO
        if err <= 1.0:
            fac = fac11 / err_old**_BETA
            fac = max(0.1, min(5.0, fac / SAFETY))
            clamped = False
            for j in range(2):
                if ynew[j] < 0.0:
                    if ynew[j] >= -atol:
                        ynew[j] = 0.0
                        clamped = True
                    else:
                        status = 3
            t += h
            for i in range(4):
                y[i] = ynew[i]
            if n == cap:
                cap *= 2
                ts2 = np.empty(cap)
                ys2 = np.empty((cap, 4))
                ts2[:n] = ts[:n]
                ys2[:n] = ys[:n]
                ts = ts2
                ys = ys2
            ts[n] = t
            ys[n] = y
            n += 1
            accepted += 1
            if status == 3:
                break
            err_old = max(err, 1e-4)
            if clamped:
                field_kernel(y, k[0], sign, g1, g2, xi, eps, P, Q, A, B, l1, l2, pp, pv, qp, qv)
            else:
                # first-same-as-last: the final stage already is F(y)
                for i in range(4):
                    k[0, i] = k[6, i]
            h = h / fac
        else:
            h = h / min(5.0, fac11 / SAFETY)
            rejected += 1
    return ts[:n], ys[:n], accepted, rejected, status


@njit(cache=True)
def _fixed_step(y0, h, n_steps, g1, g2, xi, eps, P, Q, A, B, l1, l2, pp, pv, qp, qv):
    k = np.empty((7, 4))
    ytmp = np.empty(4)
    y = y0.copy()
    for _ in range(n_steps):
        field_kernel(y, k[0], 1.0, g1, g2, xi, eps, P, Q, A, B, l1, l2, pp, pv, qp, qv)
        _stages(y, h, k, ytmp, 1.0, g1, g2, xi, eps, P, Q, A, B, l1, l2, pp, pv, qp, qv)
        for i in range(4):
            y[i] = ytmp[i]
    return y


def fixed_step_solve(state0: ReducedState, params, coeffs, t_end: float, n_steps: int) -> np.ndarray:
    """Propagate with ``n_steps`` equal Dormand-Prince steps (5th-order solution)."""
    return _fixed_step(state0.as_array(), t_end / n_steps, n_steps, *kernel_args(params, coeffs))


@dataclass
class Trajectory:
    """Accepted steps of one integration.

    ``states`` has one row ``(sigma1, sigma2, psi1, psi2)`` per entry of
    ``times``; ``residuals`` is the raw syzygy residual per row.
    """

    times: np.ndarray
    states: np.ndarray
    residuals: np.ndarray
    max_syzygy_drift: float
    accepted: int
    rejected: int
    params: ScaledParameters
    backward: bool = False

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> ReducedState:
        return ReducedState.from_array(self.states[i])

    @property
    def final(self) -> ReducedState:
        return self.state(-1)

    @property
    def degenerate_fibre(self) -> np.ndarray:
        """Rows where the fibre circle has (numerically) collapsed."""
        return self.states[:, 0] * self.states[:, 1] < 1e-14

    def to_csv(self) -> str:
        lines = ["t,sigma1,sigma2,psi1,psi2,residual"]
        for t, y, r in zip(self.times, self.states, self.residuals):
            lines.append(",".join(_fmt(v) for v in (t, *y, r)))
        return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def syzygy_residuals(states: np.ndarray, ell) -> np.ndarray:
    s1, s2, f1, f2 = states.T
    return s1**ell.ell2 * s2**ell.ell1 - ell.g_ell * (f1**2 + f2**2)


def relative_drift(states: np.ndarray, ell) -> np.ndarray:
    norm = np.hypot(states[:, 0], states[:, 1])
    return np.abs(syzygy_residuals(states, ell)) / (1.0 + norm**ell.order)


def integrate(
    state0: ReducedState,
    params: ScaledParameters,
    coeffs: ReducedCoefficients,
    t_end: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-10,
    backward: bool = False,
    max_steps: int = 10_000_000,
) -> Trajectory:
    """Integrate the reduced field from ``state0`` over ``[0, t_end]``.

    With ``backward=True`` the time-reversed field is integrated, so row
    ``i`` holds the state at time ``-times[i]``.
    """
    if not (rel_tol > 0 and abs_tol > 0):
        raise ConfigError("tolerances must be positive")
    if not t_end > 0:
        raise ConfigError("t_end must be positive")
    y0 = state0.as_array()
    if not np.all(np.isfinite(y0)):
        raise ConfigError("initial state must be finite")
    if y0[0] < 0 or y0[1] < 0:
        raise DomainError("amplitudes sigma must be nonnegative")
    sign = -1.0 if backward else 1.0
    ts, ys, acc, rej, status = _dopri(
        y0, float(t_end), float(rel_tol), float(abs_tol), INITIAL_STEP, int(max_steps), sign,
        *kernel_args(params, coeffs),
    )
    if status == STATUS_UNDERFLOW:
        raise StiffnessError(
            f"step size underflow at t = {ts[-1]:.6g} with |sigma| = {np.hypot(*ys[-1, :2]):.3g}"
            " (finite-time blow-up or stiffness)"
        )
    if status == STATUS_NONFINITE:
        raise DivergenceError(f"non-finite state near t = {ts[-1]:.6g}")
    if status == STATUS_UNDERSHOOT:
        raise DomainError(f"sigma undershoot below -abs_tol at t = {ts[-1]:.6g}: {ys[-1]}")
    if status == STATUS_MAXSTEPS:
        raise IntegrationError(f"step budget {max_steps} exhausted at t = {ts[-1]:.6g}")
    res = syzygy_residuals(ys, coeffs.ell)
    drift = float(relative_drift(ys, coeffs.ell).max())
    return Trajectory(ts, ys, res, drift, int(acc), int(rej), params, backward)


# ---------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class OrbitDiagnosis:
    """``kind`` is ``relative_equilibrium``, ``relative_periodic`` or ``other``.

    ``indeterminate`` is set when the tail has not settled.
    """

    kind: str
    period: float | None = None
    rate: float | None = None
    indeterminate: bool = False


TAIL_FRACTION = 0.2
TAIL_MIN = 5
QUADRATURE_POINTS = 4096


def _fibre_period(state: ReducedState, params, coeffs) -> float | None:
    """Return time of one turn around the fibre over ``state.sigma``, or None if ``w`` vanishes on it."""
    r = np.hypot(state.psi1, state.psi2)
    phi = np.linspace(0.0, 2 * np.pi, QUADRATURE_POINTS + 1)
    w = np.array(
        [fibre_rates(ReducedState(state.sigma1, state.sigma2, r * np.cos(a), r * np.sin(a)), params, coeffs)[1] for a in phi]
    )
    if np.any(np.sign(w) != np.sign(w[0])) or np.min(np.abs(w)) == 0.0:
        return None
    return float(trapezoid(1.0 / np.abs(w), phi))


def detect_relative_orbit(
    traj: Trajectory,
    params: ScaledParameters | None = None,
    coeffs: ReducedCoefficients | None = None,
    eq_tol: float = 1e-8,
    sigma_tol: float = 1e-6,
) -> OrbitDiagnosis:
    """Classify the attractor reached by ``traj`` from the last ``TAIL_FRACTION`` of its time span.

    The fibre rotation is read off the sampled angle when the samples resolve
    it; otherwise, given ``params`` and ``coeffs``, the turn time is computed
    from the exact angular rate ``w`` on the final fibre.
    """
    times = traj.times
    t_cut = times[-1] - TAIL_FRACTION * (times[-1] - times[0])
    first = min(int(np.searchsorted(times, t_cut)), max(len(times) - TAIL_MIN, 0))
    tail, tt = traj.states[first:], times[first:]
    if len(tail) < 2:
        return OrbitDiagnosis("other", indeterminate=True)
    spread = tail.max(axis=0) - tail.min(axis=0)
    if spread.max() < eq_tol:
        return OrbitDiagnosis("relative_equilibrium", rate=0.0)
    scale = 1.0 + np.abs(tail[:, :2]).max()
    if spread[:2].max() >= sigma_tol * scale:
        return OrbitDiagnosis("other", indeterminate=True)
    radius = np.hypot(tail[:, 2], tail[:, 3])
    if radius.min() < 1e-12:
        return OrbitDiagnosis("relative_equilibrium", rate=0.0)
    raw = np.arctan2(tail[:, 3], tail[:, 2])
    step = np.angle(np.exp(1j * np.diff(raw)))
    duration = tt[-1] - tt[0]
    if np.abs(step).max() < 0.5 * np.pi:
        turn = float(step.sum())
        rate = turn / duration
        if abs(turn) >= 2 * np.pi:
            return OrbitDiagnosis("relative_periodic", period=float(2 * np.pi / abs(rate)), rate=float(rate))
        late = max(len(step) // 10, 1)
        late_rate = float(step[-late:].sum() / (tt[-1] - tt[-late - 1]))
        if abs(late_rate) < sigma_tol:
            return OrbitDiagnosis("relative_equilibrium", rate=late_rate)
    if params is None or coeffs is None:
        return OrbitDiagnosis("other", indeterminate=True)
    final = traj.final
    _, w_end = fibre_rates(final, params, coeffs)
    if abs(w_end) < sigma_tol:
        return OrbitDiagnosis("relative_equilibrium", rate=float(w_end))
    period = _fibre_period(final, params, coeffs)
    if period is None:
        # w changes sign on the fibre but the state has not reached a zero yet
        return OrbitDiagnosis("other", rate=float(w_end), indeterminate=True)
    return OrbitDiagnosis("relative_periodic", period=period, rate=float(np.sign(w_end) * 2 * np.pi / period))


@dataclass
class TorusPhaseTrack:
    times: np.ndarray
    phases: np.ndarray  # (k, n), reduced mod 2*pi
    unwrapped: np.ndarray

    def to_csv(self) -> str:
        n = self.phases.shape[1]
        lines = ["t," + ",".join(f"x{i + 1}" for i in range(n))]
        for t, x in zip(self.times, self.phases):
            lines.append(",".join(_fmt(v) for v in (t, *x)))
        return "\n".join(lines) + "\n"


def driving_rates(traj: Trajectory, coeffs: ReducedCoefficients) -> np.ndarray:
    """``omega + fhat(tau1, tau2) + a0 tau3 + c0 tau4`` at every sample."""
    if coeffs.driving is None:
        raise ConfigError("torus-phase reconstruction needs a driving record")
    d = coeffs.driving
    eps = traj.params.epsilon
    rates = np.empty((len(traj), d.n))
    for i, y in enumerate(traj.states):
        tau = tau_from_state(ReducedState.from_array(y), eps, coeffs.ell)
        rates[i] = d.omega + d.fhat(tau[0], tau[1]) + d.a0 * tau[2] + d.c0 * tau[3]
    return rates


def reconstruct_torus_phases(
    traj: Trajectory, coeffs: ReducedCoefficients, x0=None
) -> TorusPhaseTrack:
    """Trapezoidal quadrature of the torus driving along ``traj``.

    ``tau`` is recovered from the scaled state with the trajectory's
    ``epsilon``; time is the trajectory's own time variable.
    """
    rates = driving_rates(traj, coeffs)
    x0 = np.zeros(rates.shape[1]) if x0 is None else np.asarray(x0, dtype=float)
    x = x0 + cumulative_trapezoid(rates, traj.times, axis=0, initial=0.0)
    return TorusPhaseTrack(traj.times.copy(), np.mod(x, 2 * np.pi), x)


def phase_portrait(
    params: ScaledParameters,
    coeffs: ReducedCoefficients,
    seeds: list[ReducedState],
    t_end: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-10,
) -> list[Trajectory | IntegrationError | DomainError]:
    """Integrate every seed; failures are returned in place instead of raised."""
    out: list = []
    for seed in seeds:
        try:
            out.append(integrate(seed, params, coeffs, t_end, rel_tol, abs_tol))
        except (IntegrationError, DomainError) as exc:
            out.append(exc)
    return out
