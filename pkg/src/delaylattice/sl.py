"""Stuart-Landau lattice analytics.

Covers the steady-state spectrum (exact Lambert-W form and the large-delay
asymptotic curve), enumeration of the plane-wave family via the Kepler
equation, and plane-wave Floquet stability: the exact quasi-polynomial,
the delay-free strong spectrum, the asymptotic two-branch growth curves,
the neutral-stability cubic and the Hessian test at the trivial exponent.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import TWO_PI, LatticeSpec, SLParams, WaveVector, enumerate_modes
from .lambertw import MAX_BRANCH, LambertWError, lambert_w_log
from .roots import RootSet, find_roots_quasipoly, solve_cubic_real, solve_kepler

TRIVIAL_EXCLUSION_RADIUS = 1e-6
STABILITY_TOL = 1e-6


@dataclass(frozen=True)
class PlaneWave:
    """Travelling-wave solution a*exp(i(Omega*t - k1*m - k2*n)).

    ``k_tau = k_plus - Omega*tau`` is the phase picked up over one delay,
    ``R = C*cos(k_minus)`` the effective coupling of the mode.
    """
    a: float
    Omega: float
    wv: WaveVector
    k_tau: float
    R: float

    @property
    def a2(self) -> float:
        return self.a * self.a


class StabilityClass(Enum):
    STABLE = "stable"
    STRONG_UNSTABLE = "strong"
    UNIFORM_UNSTABLE = "uniform"
    MODULATIONAL_UNSTABLE = "modulational"


@dataclass(frozen=True)
class StabilityVerdict:
    cls: StabilityClass
    max_growth: float
    witness: tuple  # (omega, q_minus, q_plus) of the most unstable perturbation


@dataclass(frozen=True)
class PCSCurve:
    """Sampled asymptotic growth curve gamma over (frequency, spatial mode)."""
    samples: np.ndarray  # columns (omega, q_minus, gamma)
    branch: str = ""


def _branch_range(beta: float, C: float, tau: float,
                  n_extra: int = 6) -> range:
    # pseudo-continuous roots near Im lambda in beta +- C need branches
    # around j ~ Omega*tau/(2*pi)
    span = (abs(beta) + C + 1.0) * tau / TWO_PI
    J = min(MAX_BRANCH, int(math.ceil(span)) + n_extra)
    return range(-J, J + 1)


def sl_stst_eigenvalues(params: SLParams, C: float, tau: float,
                        wv: WaveVector,
                        branches: Optional[Iterable[int]] = None) -> RootSet:
    """Exact eigenvalues of the zero steady state for one Fourier mode.

    lambda_j = alpha + i*beta + W_j(tau*R*exp(i*k_plus - (alpha+i*beta)*tau))/tau
    with R = C*cos(k_minus). When the delayed term vanishes (R = 0) the
    single instantaneous eigenvalue alpha + i*beta is returned.
    """
    if tau <= 0:
        raise ValueError("tau must be > 0")
    alpha, beta = params.alpha, params.beta
    mu = complex(alpha, beta)
    R = C * math.cos(wv.k_minus)
    window = (-np.inf, np.inf, -np.inf, np.inf)
    if R == 0.0:
        return RootSet(roots=np.array([mu]), tolerance=1e-10, window=window)
    if branches is None:
        branches = _branch_range(beta, C, tau)
    # work with log z: for strongly stable alpha the argument of W exceeds
    # the double-precision exponent range
    log_z = (math.log(tau * abs(R)) - alpha * tau
             + 1j * (wv.k_plus - beta * tau + (math.pi if R < 0 else 0.0)))
    roots = []
    for j in branches:
        try:
            w = lambert_w_log(j, log_z)
        except LambertWError:
            continue
        lam = mu + w / tau
        # factor of the characteristic product for this mode
        resid = abs(-lam + mu + cmath.exp(log_z - w) / tau)
        if resid <= 1e-10 * max(1.0, abs(lam)):
            roots.append(lam)
    return RootSet(roots=np.array(roots), tolerance=1e-10, window=window)


def sl_stst_pcs(params: SLParams, C: float, k_minus: float,
                Omega) -> np.ndarray:
    """Asymptotic growth curve of the steady state:
    gamma = -1/2 * log[(alpha^2 + (beta-Omega)^2) / (C^2 cos^2 k_minus)].
    """
    R2 = (C * math.cos(k_minus)) ** 2
    # cos(pi/2) rounds to ~6e-17, so compare with a tolerance
    if R2 < 1e-24:
        raise ValueError("mode decoupled: cos(k_minus) = 0 gives gamma = -inf")
    Omega = np.asarray(Omega, dtype=float)
    gamma = -0.5 * np.log((params.alpha ** 2 + (params.beta - Omega) ** 2) / R2)
    return gamma if gamma.ndim else float(gamma)


def sl_rightmost_eigenvalue(params: SLParams, C: float, tau: float,
                            spec: LatticeSpec) -> float:
    """Max Re(lambda) of the steady state over all lattice modes."""
    best = -np.inf
    for wv in enumerate_modes(spec):
        rs = sl_stst_eigenvalues(params, C, tau, wv)
        best = max(best, rs.max_real())
    return best


def sl_hopf_threshold(params: SLParams, C: float, tau: float,
                      spec: LatticeSpec, bracket: tuple = None,
                      tol: float = 1e-6) -> float:
    """The alpha at which the rightmost steady-state eigenvalue over all
    modes crosses zero, by bisection on alpha."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if tau == 0.0:
        # instantaneous eigenvalue alpha + C cos(k_minus) e^{i k_plus};
        # most unstable mode is k_plus = k_minus = 0
        return -C
    if bracket is None:
        bracket = (-C - max(2.0, C), -C + max(2.0, C))
    lo, hi = bracket

    def rightmost(alpha):
        return sl_rightmost_eigenvalue(SLParams(alpha, params.beta), C, tau, spec)

    f_lo, f_hi = rightmost(lo), rightmost(hi)
    if not (f_lo < 0 < f_hi):
        raise ArithmeticError(
            f"no sign change of the rightmost eigenvalue on alpha in "
            f"[{lo}, {hi}]: f({lo})={f_lo:.3g}, f({hi})={f_hi:.3g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if rightmost(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sl_enumerate_plane_waves(params: SLParams, C: float, tau: float,
                             spec: LatticeSpec) -> list[PlaneWave]:
    """All plane waves of the lattice: one per Kepler root with positive
    squared amplitude. Zero-amplitude solutions (the Hopf points) are
    dropped. Output is sorted by mode index, then frequency."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    alpha, beta = params.alpha, params.beta
    waves = []
    for wv in enumerate_modes(spec):
        R = C * math.cos(wv.k_minus)
        for Om in solve_kepler(beta, R, wv.k_plus, tau):
            k_tau = wv.k_plus - Om * tau
            a2 = alpha + R * math.cos(k_tau)
            if a2 > 0.0:
                waves.append(PlaneWave(a=math.sqrt(a2), Omega=float(Om),
                                       wv=wv, k_tau=float(k_tau), R=R))
    return waves


def sl_floquet_chi(wave: PlaneWave, lam, q_plus: float, q_minus: float,
                   C: float, tau: float):
    """Exact Floquet characteristic function chi(lambda; q_minus, q_plus)
    of a plane wave. Accepts scalar or array lambda."""
    a2, R, kt = wave.a2, wave.R, wave.k_tau
    Rp = C * math.cos(wave.wv.k_minus + q_minus)
    Rm = C * math.cos(wave.wv.k_minus - q_minus)
    P = a2 + R * math.cos(kt)
    G = Rp * cmath.exp(1j * kt) + Rm * cmath.exp(-1j * kt)
    Hd = Rp * cmath.exp(1j * kt) - Rm * cmath.exp(-1j * kt)
    lam = np.asarray(lam, dtype=complex)
    e1 = np.exp(-lam * tau + 1j * q_plus)
    chi = (lam * lam + 2.0 * P * lam + R * R + 2.0 * R * a2 * math.cos(kt)
           + Rp * Rm * e1 * e1
           - ((P + lam) * G - 1j * R * math.sin(kt) * Hd) * e1)
    return chi if chi.ndim else complex(chi)


def _chi_and_deriv(wave: PlaneWave, C: float, tau: float,
                   q_plus: float, q_minus: float):
    a2, R, kt = wave.a2, wave.R, wave.k_tau
    Rp = C * math.cos(wave.wv.k_minus + q_minus)
    Rm = C * math.cos(wave.wv.k_minus - q_minus)
    P = a2 + R * math.cos(kt)
    G = Rp * cmath.exp(1j * kt) + Rm * cmath.exp(-1j * kt)
    Hd = Rp * cmath.exp(1j * kt) - Rm * cmath.exp(-1j * kt)
    const = R * R + 2.0 * R * a2 * math.cos(kt)
    Q = 1j * R * math.sin(kt) * Hd

    def f(lam):
        e1 = np.exp(-lam * tau + 1j * q_plus)
        return (lam * lam + 2.0 * P * lam + const + Rp * Rm * e1 * e1
                - ((P + lam) * G - Q) * e1)

    def df(lam):
        e1 = np.exp(-lam * tau + 1j * q_plus)
        return (2.0 * lam + 2.0 * P - 2.0 * tau * Rp * Rm * e1 * e1
                - G * e1 + tau * ((P + lam) * G - Q) * e1)

    return f, df


def sl_strong_spectrum(wave: PlaneWave, params: SLParams, C: float):
    """Delay-free strong spectrum of a plane wave and the amplitude
    threshold a_S below which at least one strong eigenvalue is unstable."""
    alpha = params.alpha
    a2, R = wave.a2, wave.R
    disc = a2 * a2 + (a2 - alpha) ** 2 - R * R
    root = cmath.sqrt(disc)
    lam_p = alpha - 2.0 * a2 + root
    lam_m = alpha - 2.0 * a2 - root
    absR = abs(R)
    if alpha < -absR:
        a_s2 = 0.0
    elif alpha <= math.sqrt(2.0) * absR:
        a_s2 = alpha / 2.0
    else:
        a_s2 = 0.5 * (alpha + math.sqrt(alpha * alpha - 2.0 * R * R))
    a_s = math.sqrt(max(a_s2, 0.0))
    return lam_p, lam_m, a_s


def _pcs_coeffs(wave: PlaneWave, C: float, omega, q_minus):
    a2, R, kt = wave.a2, wave.R, wave.k_tau
    km = wave.wv.k_minus
    omega = np.asarray(omega, dtype=float)
    q_minus = np.asarray(q_minus, dtype=float)
    S = C * C * np.cos(km + q_minus) * np.cos(km - q_minus)
    A = C * ((R + a2 * math.cos(kt)) * math.cos(km) * np.cos(q_minus)
             + omega * math.sin(kt) * math.sin(km) * np.sin(q_minus))
    B = C * (-a2 * math.sin(kt) * math.sin(km) * np.sin(q_minus)
             + omega * math.cos(kt) * math.cos(km) * np.cos(q_minus))
    D = R * R - omega * omega + 2.0 * R * a2 * math.cos(kt)
    E = 2.0 * omega * (a2 + R * math.cos(kt))
    return S, A, B, D, E


def sl_floquet_pcs_Y(wave: PlaneWave, C: float, omega, q_minus):
    """The two multiplier branches Y+-(omega, q_minus) of the asymptotic
    Floquet spectrum (quadratic in Y; principal square root)."""
    S, A, B, D, E = _pcs_coeffs(wave, C, omega, q_minus)
    AB = A + 1j * B
    zeta = A * A - B * B - S * D + 1j * (2.0 * A * B - S * E)
    root = np.sqrt(zeta.astype(complex))
    with np.errstate(all="ignore"):
        Yp = np.where(S != 0, (AB + root) / np.where(S == 0, 1.0, S),
                      np.nan + 0j)
        Ym = np.where(S != 0, (AB - root) / np.where(S == 0, 1.0, S),
                      np.nan + 0j)
    # degenerate linear case S = 0: single multiplier
    if np.any(S == 0):
        lin = (D + 1j * E) / (2.0 * AB)
        Yp = np.where(S == 0, lin, Yp)
        Ym = np.where(S == 0, lin, Ym)
    return Yp, Ym


def sl_floquet_pcs(wave: PlaneWave, C: float, omega, q_minus):
    """Asymptotic growth rates (gamma_plus, gamma_minus) of perturbations
    with temporal frequency omega and spatial mode q_minus."""
    Yp, Ym = sl_floquet_pcs_Y(wave, C, omega, q_minus)
    with np.errstate(divide="ignore"):
        gp = -np.log(np.abs(Yp))
        gm = -np.log(np.abs(Ym))
    if gp.ndim == 0:
        return float(gp), float(gm)
    return gp, gm


def sl_floquet_exact(wave: PlaneWave, params: SLParams, C: float, tau: float,
                     q_modes: Optional[Sequence[WaveVector]] = None,
                     spec: Optional[LatticeSpec] = None,
                     infinite: bool = False, n_infinite: int = 256,
                     seeds: tuple = (40, 40)) -> StabilityVerdict:
    """Stability verdict of a plane wave from the exact quasi-polynomial.

    For each perturbation mode (q_plus, q_minus), Newton sweeps locate the
    characteristic roots in the window Re in [-2, max(1, 2*alpha)],
    Im in [-(3|beta|+3), 3|beta|+3]. The verdict follows from the maximal
    real part, excluding the trivial root at (lambda=0, q=0)."""
    alpha, beta = params.alpha, params.beta
    if infinite:
        # continuous-lattice mode: uniform product sampling of the q-torus
        nq = max(2, int(math.sqrt(n_infinite)))
        pairs = [(float(p), float(m))
                 for m in np.linspace(-math.pi, math.pi, nq, endpoint=False)
                 for p in np.linspace(0.0, TWO_PI, nq, endpoint=False)]
    else:
        if q_modes is None:
            if spec is None:
                raise ValueError("need q_modes, spec, or infinite=True")
            q_modes = enumerate_modes(spec)
        pairs = [(q.k_plus, q.k_minus) for q in q_modes]

    window = (-2.0, max(1.0, 2.0 * alpha), -(3.0 * abs(beta) + 3.0),
              3.0 * abs(beta) + 3.0)
    max_growth = -np.inf
    witness = (0.0, 0.0, 0.0)
    for q_plus, q_minus in pairs:
        f, df = _chi_and_deriv(wave, C, tau, q_plus, q_minus)
        rs = find_roots_quasipoly(f, window, grid=seeds, df=df)
        trivial_mode = (abs(math.sin(q_plus)) < 1e-12
                        and abs(math.cos(q_plus) - 1.0) < 1e-12
                        and abs(math.sin(q_minus)) < 1e-12)
        for lam in rs.roots:
            if trivial_mode and abs(lam) < TRIVIAL_EXCLUSION_RADIUS:
                continue
            if lam.real > max_growth:
                max_growth = float(lam.real)
                witness = (float(lam.imag), q_minus, q_plus)

    if max_growth <= STABILITY_TOL:
        cls = StabilityClass.STABLE
    else:
        _, _, a_s = sl_strong_spectrum(wave, params, C)
        if wave.a < a_s - 1e-12:
            cls = StabilityClass.STRONG_UNSTABLE
        elif math.cos(wave.k_tau) < 0.0:
            cls = StabilityClass.UNIFORM_UNSTABLE
        else:
            cls = StabilityClass.MODULATIONAL_UNSTABLE
    return StabilityVerdict(cls=cls, max_growth=max_growth, witness=witness)


def sl_neutral_amplitude(alpha: float, C: float, k_minus: float) -> np.ndarray:
    """Real roots a^2 of the neutral-stability cubic for waves with spatial
    mode k_minus. The largest root is the sideband (Eckhaus-type) threshold."""
    R = C * math.cos(k_minus)
    s2 = math.sin(k_minus) ** 2
    c2 = -2.5 * alpha
    c1 = 2.0 * alpha * alpha - 0.5 * R * R * (1.0 + 2.0 * s2)
    c0 = -0.5 * alpha ** 3 + 0.5 * R * R * alpha * (1.0 + s2)
    return solve_cubic_real(1.0, c2, c1, c0)


def sl_alpha0(k_minus: float, k_tau: float, C: float) -> float:
    """Minimal alpha at which a wave with given (k_minus, k_tau) stabilizes."""
    R = C * math.cos(k_minus)
    denom = math.cos(k_minus) ** 2 - math.sin(k_tau) ** 2
    if denom == 0.0:
        raise ZeroDivisionError(
            f"pole: cos^2(k_minus) = sin^2(k_tau) at k_minus={k_minus}, "
            f"k_tau={k_tau}")
    return R * math.cos(k_tau) * (1.0 - 2.0 * denom) / denom


def sl_hessian_at_trivial(wave: PlaneWave) -> np.ndarray:
    """Closed-form Hessian of the trivial-branch growth surface at
    (omega, q_minus) = (0, 0). Only valid for cos(k_tau) > 0; the regime
    cos(k_tau) <= 0 is uniformly unstable and rejected."""
    a2, R, kt = wave.a2, wave.R, wave.k_tau
    km = wave.wv.k_minus
    ck = math.cos(kt)
    if ck <= 0.0:
        raise ValueError("uniform-instability regime: cos(k_tau) <= 0")
    sk = math.sin(kt)
    h_ww = ((R / a2) * (sk * sk / ck) - 1.0) / (R * R * ck * ck)
    h_qq = (-1.0 + R * math.tan(km) ** 2 / (a2 * ck ** 3)
            + math.tan(km) ** 2 * math.tan(kt) ** 2)
    h_wq = math.tan(km) * math.tan(kt) / (a2 * ck * ck)
    return np.array([[h_ww, h_wq], [h_wq, h_qq]])


def hessian_negative_definite(H: np.ndarray) -> bool:
    return H[0, 0] < 0.0 and float(np.linalg.det(H)) > 0.0


def plane_wave_invariant_residuals(wave: PlaneWave, params: SLParams) -> tuple:
    """Residuals of the defining relations of a plane wave: amplitude,
    frequency, and the circle identity."""
    r_a = wave.a2 - (params.alpha + wave.R * math.cos(wave.k_tau))
    r_om = wave.Omega - (params.beta + wave.R * math.sin(wave.k_tau))
    r_circ = ((wave.a2 - params.alpha) ** 2
              + (wave.Omega - params.beta) ** 2 - wave.R ** 2)
    return r_a, r_om, r_circ
