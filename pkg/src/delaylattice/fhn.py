"""FitzHugh-Nagumo lattice analytics: steady states of the synaptically
coupled model, the linearization matrices, exact characteristic roots,
the delay-free strong spectrum, the hybrid dispersion relation, and the
location of Hopf points."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import FHNParams, WaveVector
from .roots import RootSet, find_roots_quasipoly


def gate_rate(v):
    """Synaptic activation rate alpha(v) = 1/2 * [1 + exp(-5(v-1))]^-1."""
    return 0.5 / (1.0 + np.exp(-5.0 * (np.asarray(v, dtype=float) - 1.0)))


def gate_rate_deriv(v):
    al = gate_rate(v)
    return 5.0 * al * (1.0 - 2.0 * al)


def synaptic_gate(v):
    """Steady-state gating value s(v) = alpha(v) / (alpha(v) + 0.6)."""
    al = gate_rate(v)
    return al / (al + 0.6)


@dataclass(frozen=True)
class FhnSteadyState:
    v: float
    w: float
    s: float


@dataclass(frozen=True)
class LinearizationPair:
    """Instantaneous Jacobian A and delayed-coupling matrix B (rank one,
    single entry b13)."""
    A: np.ndarray
    B: np.ndarray

    @property
    def b13(self) -> float:
        return float(self.B[0, 2])


def _stst_residual(v, params: FHNParams, C: float):
    v = np.asarray(v, dtype=float)
    return (v - v ** 3 / 3.0 - (v + params.a) / params.b + params.I
            + C * (params.v_r - v) * synaptic_gate(v))


def fhn_steady_states(params: FHNParams, C: float,
                      v_range: tuple = (-5.0, 5.0),
                      scan_step: float = 1e-3) -> list[FhnSteadyState]:
    """All homogeneous steady states: real roots of the scalar rest-state
    equation, found by dense bracketing plus bisection."""
    lo, hi = v_range
    n = int(math.ceil((hi - lo) / scan_step)) + 1
    v = np.linspace(lo, hi, n)
    g = _stst_residual(v, params, C)
    states = []
    sign = np.sign(g)
    for i in np.flatnonzero(sign[:-1] * sign[1:] < 0):
        vb = brentq(lambda x: float(_stst_residual(x, params, C)),
                    v[i], v[i + 1], xtol=1e-14, rtol=8.9e-16)
        states.append(vb)
    for i in np.flatnonzero(g == 0.0):
        states.append(float(v[i]))
    states = sorted(states)
    out = []
    for vb in states:
        if out and abs(vb - out[-1].v) < 1e-9:
            continue
        out.append(FhnSteadyState(v=vb, w=(vb + params.a) / params.b,
                                  s=float(synaptic_gate(vb))))
    return out


def stst_current(v: float, params: FHNParams, C: float) -> float:
    """The injected current I that makes v a rest potential."""
    return -(v - v ** 3 / 3.0 - (v + params.a) / params.b
             + C * (params.v_r - v) * synaptic_gate(v))


def _fold_coupling(v, params: FHNParams):
    """C at which the rest-state equation has vanishing v-derivative at v
    (the current I drops out of the derivative)."""
    v = np.asarray(v, dtype=float)
    phi_prime = (-synaptic_gate(v)
                 + (params.v_r - v) * _gate_deriv_of_s(v))
    num = v * v - 1.0 + 1.0 / params.b
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(phi_prime > 0, num / phi_prime, np.inf)


def _gate_deriv_of_s(v):
    # d/dv [alpha/(alpha+0.6)] = 0.6 alpha' / (alpha+0.6)^2
    al = gate_rate(v)
    return 0.6 * gate_rate_deriv(v) / (al + 0.6) ** 2


def fhn_saddle_node_C(params: Optional[FHNParams] = None) -> float:
    """Smallest coupling strength at which the rest-state equation first
    admits a fold (double root) in (v, I)."""
    if params is None:
        params = FHNParams()
    # C(v) = (v^2 - 1 + 1/b) / phi'(v) where phi(v) = (v_r - v) s(v);
    # the fold first appears at the minimum of C(v) over v with phi' > 0
    v = np.linspace(-3.0, 3.0, 60001)
    Cv = _fold_coupling(v, params)
    i = int(np.argmin(Cv))
    if not np.isfinite(Cv[i]):
        raise ArithmeticError("no fold point found in the scanned v range")
    # golden-section polish around the discrete minimum
    a, b = v[max(i - 2, 0)], v[min(i + 2, len(v) - 1)]
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - gr * (b - a)
    x2 = a + gr * (b - a)
    f1 = float(_fold_coupling(x1, params))
    f2 = float(_fold_coupling(x2, params))
    for _ in range(200):
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - gr * (b - a)
            f1 = float(_fold_coupling(x1, params))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + gr * (b - a)
            f2 = float(_fold_coupling(x2, params))
        if b - a < 1e-12:
            break
    return float(min(f1, f2))


def fhn_linearization(stst: FhnSteadyState, params: FHNParams,
                      C: float) -> LinearizationPair:
    al = float(gate_rate(stst.v))
    A = np.array([
        [1.0 - stst.v ** 2 - C * stst.s, -1.0, 0.0],
        [params.eps, -params.b * params.eps, 0.0],
        [5.0 * al * (1.0 - 2.0 * al) * (1.0 - stst.s), 0.0, -al - 0.6],
    ])
    B = np.zeros((3, 3))
    B[0, 2] = 0.5 * C * (params.v_r - stst.v)
    return LinearizationPair(A=A, B=B)


def fhn_char_function(lin: LinearizationPair, tau: float, wv: WaveVector):
    """The scalar characteristic function det(-lambda*Id + A + 2B cos(k_minus)
    e^{i k_plus} e^{-lambda tau}) expanded using the rank-1 structure of B.
    Returns (f, df) callables accepting complex arrays."""
    A = lin.A
    a11, a12 = A[0, 0], A[0, 1]
    a21, a22 = A[1, 0], A[1, 1]
    a31, a33 = A[2, 0], A[2, 2]
    coup = 2.0 * lin.b13 * math.cos(wv.k_minus) * cmath.exp(1j * wv.k_plus)

    def f(lam):
        lam = np.asarray(lam, dtype=complex)
        e = np.exp(-lam * tau)
        return ((a11 - lam) * (a22 - lam) * (a33 - lam)
                - a12 * a21 * (a33 - lam)
                - a31 * (a22 - lam) * coup * e)

    def df(lam):
        lam = np.asarray(lam, dtype=complex)
        e = np.exp(-lam * tau)
        d_poly = (-(a22 - lam) * (a33 - lam) - (a11 - lam) * (a33 - lam)
                  - (a11 - lam) * (a22 - lam) + a12 * a21)
        d_coup = a31 * coup * e * (1.0 + tau * (a22 - lam))
        return d_poly + d_coup

    return f, df


def fhn_char_roots(stst: FhnSteadyState, params: FHNParams, C: float,
                   tau: float, wv: WaveVector,
                   window: tuple = (-2.0, 1.0, -4.0, 4.0),
                   grid: tuple = (40, 40)) -> RootSet:
    """Characteristic roots of the steady state for one Fourier mode,
    inside the given complex window."""
    lin = fhn_linearization(stst, params, C)
    if C == 0.0 or abs(math.cos(wv.k_minus)) < 1e-12 or lin.b13 == 0.0:
        lam = np.linalg.eigvals(lin.A)
        re_min, re_max, im_min, im_max = window
        keep = ((lam.real >= re_min) & (lam.real <= re_max)
                & (lam.imag >= im_min) & (lam.imag <= im_max))
        return RootSet(roots=lam[keep], tolerance=1e-10, window=window)
    if tau == 0.0:
        coup = 2.0 * lin.b13 * math.cos(wv.k_minus) * cmath.exp(1j * wv.k_plus)
        Mat = lin.A.astype(complex)
        Mat[0, 2] += coup
        lam = np.linalg.eigvals(Mat)
        re_min, re_max, im_min, im_max = window
        keep = ((lam.real >= re_min) & (lam.real <= re_max)
                & (lam.imag >= im_min) & (lam.imag <= im_max))
        return RootSet(roots=lam[keep], tolerance=1e-10, window=window)
    f, df = fhn_char_function(lin, tau, wv)
    return find_roots_quasipoly(f, window, grid=grid, df=df)


def fhn_strong_spectrum(stst: FhnSteadyState, params: FHNParams, C: float):
    """Delay-free spectrum (lambda0, lambda+, lambda-) of the steady state.

    lambda0 = a33 is always real and <= -0.6. The strong (delay-surviving)
    unstable spectrum exists iff a11 > b*eps; the pair is complex iff
    a11 < 2*sqrt(eps) - b*eps."""
    lin = fhn_linearization(stst, params, C)
    a11 = lin.A[0, 0]
    a33 = lin.A[2, 2]
    b, eps = params.b, params.eps
    disc = (a11 + b * eps) ** 2 - 4.0 * eps
    root = cmath.sqrt(disc)
    lam_p = 0.5 * (a11 - b * eps + root)
    lam_m = 0.5 * (a11 - b * eps - root)
    return float(a33), lam_p, lam_m


def fhn_strong_spectrum_present(stst: FhnSteadyState, params: FHNParams,
                                C: float) -> bool:
    lin = fhn_linearization(stst, params, C)
    return lin.A[0, 0] > params.b * params.eps


def fhn_hybrid_dispersion(stst: FhnSteadyState, params: FHNParams, C: float,
                          Omega, k_minus):
    """Hybrid dispersion relation gamma(Omega, k_minus) of the steady state
    in the large-delay limit: gamma = -log|Y| with Y solving the linear
    multiplier equation of the rank-1 coupling."""
    lin = fhn_linearization(stst, params, C)
    A = lin.A
    a11, a12 = A[0, 0], A[0, 1]
    a21, a22 = A[1, 0], A[1, 1]
    a31, a33 = A[2, 0], A[2, 2]
    b13 = lin.b13
    Omega = np.asarray(Omega, dtype=float)
    k_minus = np.asarray(k_minus, dtype=float)
    cos_km = np.cos(k_minus)
    if np.any(np.abs(cos_km) < 1e-12):
        raise ValueError("mode decoupled: cos(k_minus) = 0")
    if a31 * b13 == 0.0:
        raise ValueError("vanishing coupling entry a31*b13")
    iw = 1j * Omega
    Y = ((a33 - iw) / (2.0 * a31 * b13 * cos_km)
         * (a11 - iw - a12 * a21 / (a22 - iw)))
    gamma = -np.log(np.abs(Y))
    return gamma if gamma.ndim else float(gamma)


def fhn_hopf_points(params: FHNParams, C: float, tau: float, wv: WaveVector,
                    I_range: tuple = (-4.0, 4.0),
                    v_range: tuple = (-2.5, 2.5),
                    omega_range: tuple = (0.0, 3.0),
                    n_seeds: tuple = (50, 50),
                    residual_tol: float = 1e-10) -> list[tuple]:
    """Hopf points (I, Omega) of the steady state for one Fourier mode.

    Solves Re/Im of the characteristic function at lambda = i*Omega by a
    2D Newton iteration over (v, Omega); the current I follows from the
    rest-state equation. Diverging seeds are skipped silently."""
    def resid(v, om):
        stst = FhnSteadyState(v=v, w=(v + params.a) / params.b,
                              s=float(synaptic_gate(v)))
        lin = fhn_linearization(stst, params, C)
        f, _ = fhn_char_function(lin, tau, wv)
        val = complex(f(1j * om))
        return np.array([val.real, val.imag])

    found = []
    v_seeds = np.linspace(v_range[0], v_range[1], n_seeds[0])
    om_seeds = np.linspace(omega_range[0] + 1e-3, omega_range[1], n_seeds[1])
    h = 1e-7
    for v0 in v_seeds:
        for om0 in om_seeds:
            x = np.array([v0, om0])
            ok = False
            for _ in range(50):
                F = resid(x[0], x[1])
                J = np.empty((2, 2))
                J[:, 0] = (resid(x[0] + h, x[1]) - resid(x[0] - h, x[1])) / (2 * h)
                J[:, 1] = (resid(x[0], x[1] + h) - resid(x[0], x[1] - h)) / (2 * h)
                try:
                    step = np.linalg.solve(J, F)
                except np.linalg.LinAlgError:
                    break
                x = x - step
                if not np.all(np.isfinite(x)) or abs(x[0]) > 10 or abs(x[1]) > 50:
                    break
                if np.max(np.abs(step)) < 1e-13 * (1.0 + np.max(np.abs(x))):
                    ok = True
                    break
            if not ok:
                continue
            v, om = float(x[0]), float(x[1])
            if om <= 1e-6:   # omega -> 0 is a fold, not a Hopf point
                continue
            if np.max(np.abs(resid(v, om))) > residual_tol:
                continue
            I = stst_current(v, params, C)
            if not (I_range[0] <= I <= I_range[1]):
                continue
            # the located rest state must actually exist at this current
            if abs(float(_stst_residual(
                    v, FHNParams(I=I, a=params.a, b=params.b,
                                 eps=params.eps, v_r=params.v_r), C))) > 1e-8:
                continue
            if any(abs(I - I0) < 1e-7 and abs(om - om0_) < 1e-7
                   for I0, om0_ in found):
                continue
            found.append((I, om))
    found.sort()
    return found
