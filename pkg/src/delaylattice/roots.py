"""Root-finding utilities: Newton sweeps for quasi-polynomials, the Kepler
equation for plane-wave frequencies, and real cubics via the companion
matrix."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

DEDUP_RADIUS = 1e-8
RESIDUAL_TOL = 1e-10


@dataclass
class RootSet:
    """Deduplicated roots inside a rectangular window of the complex plane."""
    roots: np.ndarray
    tolerance: float
    window: tuple  # (re_min, re_max, im_min, im_max)

    def __len__(self):
        return len(self.roots)

    def max_real(self) -> float:
        if len(self.roots) == 0:
            return -np.inf
        return float(np.max(self.roots.real))


def _dedup_sorted(roots: np.ndarray, radius: float = DEDUP_RADIUS) -> np.ndarray:
    if len(roots) == 0:
        return roots
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order]
    kept = []
    for r in roots:
        if all(abs(r - k) > radius for k in kept):
            kept.append(r)
    return np.array(kept)


def find_roots_quasipoly(f: Callable, window: tuple, grid: tuple = (40, 40),
                         df: Optional[Callable] = None,
                         residual_tol: float = RESIDUAL_TOL,
                         max_iter: int = 80) -> RootSet:
    """Newton iteration from a rectangular grid of seeds over the window.

    ``f`` must accept complex numpy arrays. ``df`` defaults to a central
    difference. Converged roots are kept if they lie inside the window and
    pass the residual test; duplicates within 1e-8 are merged. An empty
    result is not an error.
    """
    re_min, re_max, im_min, im_max = window
    nx, ny = grid
    if not (re_max > re_min and im_max > im_min):
        raise ValueError(f"degenerate window {window}")
    if nx < 2 or ny < 2:
        raise ValueError("grid must be at least 2 x 2")

    if df is None:
        h = 1e-7
        def df(z, _f=f):  # noqa: E731
            return (_f(z + h) - _f(z - h)) / (2 * h)

    re = np.linspace(re_min, re_max, nx)
    im = np.linspace(im_min, im_max, ny)
    z = (re[:, None] + 1j * im[None, :]).ravel()

    active = np.ones(z.shape, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        fz = f(z[active])
        dfz = df(z[active])
        with np.errstate(all="ignore"):
            step = fz / dfz
        step = np.where(np.isfinite(step), step, 0.0)
        # limit huge steps to keep seeds from shooting off
        mag = np.abs(step)
        cap = 0.5 * max(re_max - re_min, im_max - im_min)
        step = np.where(mag > cap, step * (cap / np.where(mag == 0, 1, mag)), step)
        z_new = z[active] - step
        done = np.abs(step) <= 1e-14 * (1.0 + np.abs(z_new))
        idx = np.flatnonzero(active)
        z[idx] = z_new
        active[idx[done]] = False

    # keep converged roots in the window with small residual
    scale = max(1.0, float(np.nanmedian(np.abs(f(
        (re[:, None] + 1j * im[None, :]).ravel())))))
    fz = f(z)
    # residual alone is not enough: quasi-polynomials are exponentially
    # flat along dense spectrum curves, so demand Newton convergence too
    ok = ~active
    ok &= (np.abs(fz) <= residual_tol * scale)
    ok &= (z.real >= re_min - 1e-9) & (z.real <= re_max + 1e-9)
    ok &= (z.imag >= im_min - 1e-9) & (z.imag <= im_max + 1e-9)
    ok &= np.isfinite(z)
    roots = _dedup_sorted(z[ok])
    return RootSet(roots=roots, tolerance=residual_tol * scale, window=window)


def solve_kepler(beta: float, R: float, k_plus: float, tau: float,
                 residual_tol: float = 1e-12) -> np.ndarray:
    """All real solutions Omega of Omega = beta + R*sin(k_plus - Omega*tau).

    Solutions lie in [beta-|R|, beta+|R|]. The interval is sampled finer
    than the oscillation wavelength 2*pi/tau, so no bracket is missed;
    tangencies are caught by polishing the sampled extrema as well.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    R = float(R)
    if R == 0.0:
        return np.array([beta])

    def g(om):
        return om - beta - R * np.sin(k_plus - om * tau)

    if tau == 0.0:
        return np.array([beta + R * math.sin(k_plus)])

    step = min(math.pi / (4.0 * (1.0 + abs(R) * tau)), 1e-2)
    lo = beta - abs(R) - step
    hi = beta + abs(R) + step
    n = int(math.ceil((hi - lo) / step)) + 1
    om = np.linspace(lo, hi, n)
    val = g(om)

    roots = []
    sign = np.sign(val)
    flip = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    for i in flip:
        roots.append(brentq(g, om[i], om[i + 1], xtol=1e-14, rtol=8.9e-16))
    # exact hits on the sample grid
    for i in np.flatnonzero(val == 0.0):
        roots.append(om[i])
    # tangential roots: polish local minima of |g|
    mag = np.abs(val)
    interior = np.flatnonzero((mag[1:-1] <= mag[:-2]) & (mag[1:-1] <= mag[2:])) + 1
    for i in interior:
        if mag[i] < abs(R) * 1e-3 + 1e-9:
            x = om[i]
            for _ in range(60):
                gx = g(x)
                dgx = 1.0 + R * tau * math.cos(k_plus - x * tau)
                if dgx == 0:
                    break
                x_new = x - gx / dgx
                if abs(x_new - x) < 1e-15 * (1 + abs(x)):
                    x = x_new
                    break
                x = x_new
            if abs(g(x)) <= residual_tol:
                roots.append(x)

    roots = np.array(sorted(roots))
    if len(roots):
        keep = np.ones(len(roots), dtype=bool)
        keep[1:] = np.diff(roots) > 1e-9
        roots = roots[keep]
        roots = roots[np.abs(g(roots)) <= residual_tol]
    return roots


def solve_cubic_real(c3: float, c2: float, c1: float, c0: float,
                     residual_tol: float = RESIDUAL_TOL) -> np.ndarray:
    """Real roots of c3*x^3 + c2*x^2 + c1*x + c0 via the companion matrix.

    Roots within 1e-8 of each other are reported once (multiplicity-aware).
    """
    if c3 == 0:
        raise ValueError("leading coefficient c3 must be nonzero")
    coeffs = np.array([c3, c2, c1, c0], dtype=float)
    scale = np.max(np.abs(coeffs))
    all_roots = np.roots(coeffs)
    real = []
    for r in all_roots:
        if abs(r.imag) <= 1e-8 * (1.0 + abs(r)):
            x = r.real
            # Newton polish on the real line
            for _ in range(50):
                p = ((c3 * x + c2) * x + c1) * x + c0
                dp = (3 * c3 * x + 2 * c2) * x + c1
                if dp == 0:
                    break
                x_new = x - p / dp
                if abs(x_new - x) < 1e-16 * (1 + abs(x)):
                    x = x_new
                    break
                x = x_new
            p = ((c3 * x + c2) * x + c1) * x + c0
            if abs(p) <= residual_tol * scale * max(1.0, abs(x)) ** 3:
                real.append(x)
    real = np.array(sorted(real))
    if len(real):
        keep = np.ones(len(real), dtype=bool)
        keep[1:] = np.diff(real) > 1e-8
        real = real[keep]
    return real
