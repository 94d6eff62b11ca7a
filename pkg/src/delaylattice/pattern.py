"""Componentwise time-shift encoding: turn a per-node shift field into a
heterogeneous delay map, read shift fields from PGM images, and check that
a simulated trajectory realizes the encoded pattern.

The underlying change of variables is u[m,n](t) = v[m,n](t - eta[m,n]):
the transformed node runs ahead of the homogeneous orbit by eta[m,n], so a
node with larger eta spikes earlier by the same amount.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DelayMap
from .dde import Trajectory, detect_spikes


@dataclass(frozen=True)
class ShiftField:
    """Per-node time shifts; only differences between neighbors matter
    (a global constant is pure gauge)."""
    eta: np.ndarray

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=float)
        object.__setattr__(self, "eta", eta)
        if eta.ndim != 2:
            raise ValueError("eta must be an M x N matrix")
        if not np.all(np.isfinite(eta)):
            raise ValueError("eta entries must be finite")


def delays_from_timeshifts(eta: ShiftField, tau: float) -> DelayMap:
    """Delay map realizing the shift field on a base delay tau:
    down[m,n] = tau - eta[m,n] + eta[m-1,n], right analogous, with torus
    wrapping. Raises if any resulting delay is nonpositive."""
    if tau <= 0:
        raise ValueError("tau must be > 0")
    e = eta.eta
    down = tau - e + np.roll(e, 1, axis=0)
    right = tau - e + np.roll(e, 1, axis=1)
    bad = []
    for name, mat in (("down", down), ("right", right)):
        for m, n in np.argwhere(mat <= 0):
            bad.append(f"{name}[{m},{n}]={mat[m, n]:.6g}")
    if bad:
        raise ValueError("nonpositive delays on edges: " + ", ".join(bad))
    return DelayMap(down=down, right=right)


def read_pgm(path) -> np.ndarray:
    """8-bit grayscale PGM (P2 ASCII or P5 binary) as a uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()

    tokens = []
    i = 0
    while i < len(data) and len(tokens) < 4:
        if data[i:i + 1] == b"#":
            while i < len(data) and data[i] not in b"\r\n":
                i += 1
        elif data[i] in b" \t\r\n":
            i += 1
        else:
            j = i
            while j < len(data) and data[j] not in b" \t\r\n#":
                j += 1
            tokens.append(data[i:j])
            i = j
    if len(tokens) < 4 or tokens[0] not in (b"P2", b"P5"):
        raise ValueError("not a P2/P5 PGM file")
    magic = tokens[0]
    width, height, maxval = (int(t) for t in tokens[1:4])
    if maxval != 255:
        raise ValueError(f"only 8-bit PGM supported, maxval={maxval}")
    if magic == b"P5":
        raster = data[i + 1:i + 1 + width * height]
        if len(raster) < width * height:
            raise ValueError("truncated P5 raster")
        img = np.frombuffer(raster, dtype=np.uint8, count=width * height)
    else:
        values = data[i:].split()
        if len(values) < width * height:
            raise ValueError("truncated P2 raster")
        img = np.array([int(v) for v in values[:width * height]],
                       dtype=np.uint8)
    return img.reshape(height, width)


def write_pgm(path, img: np.ndarray, binary: bool = True):
    img = np.asarray(img, dtype=np.uint8)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n"
    with open(path, "wb") as fh:
        if binary:
            fh.write(header.encode())
            fh.write(img.tobytes())
        else:
            fh.write(f"P2\n{img.shape[1]} {img.shape[0]}\n255\n".encode())
            for row in img:
                fh.write((" ".join(str(int(v)) for v in row) + "\n").encode())


def eta_from_image(image: np.ndarray, eta_min: float,
                   eta_max: float) -> ShiftField:
    """Linear gray-to-shift map: eta = eta_min + (g/255)*(eta_max-eta_min).
    Image row m maps to lattice row m, column n to lattice column n."""
    image = np.asarray(image)
    if image.dtype != np.uint8:
        raise ValueError(f"expected 8-bit image, got dtype {image.dtype}")
    if eta_min > eta_max:
        raise ValueError("eta_min must be <= eta_max")
    eta = eta_min + (image.astype(float) / 255.0) * (eta_max - eta_min)
    return ShiftField(eta=eta)


@dataclass(frozen=True)
class FidelityReport:
    correlation: Optional[float]
    max_dev: float
    missing_nodes: list

    def to_json(self) -> str:
        return json.dumps({
            "correlation": self.correlation,
            "max_dev": self.max_dev,
            "missing_nodes": [list(n) for n in self.missing_nodes],
        })


def _circular_dist(x, T):
    return (np.asarray(x) + 0.5 * T) % T - 0.5 * T


def _circular_correlation(a, b, T):
    """Fisher-Lee circular correlation of two time sequences modulo T."""
    ang_a = 2.0 * math.pi * np.asarray(a) / T
    ang_b = 2.0 * math.pi * np.asarray(b) / T
    sa = np.sin(ang_a - _circular_mean(ang_a))
    sb = np.sin(ang_b - _circular_mean(ang_b))
    denom = math.sqrt(float(np.sum(sa ** 2) * np.sum(sb ** 2)))
    if denom == 0.0:
        return None
    return float(np.sum(sa * sb) / denom)


def _circular_mean(ang):
    return math.atan2(float(np.mean(np.sin(ang))),
                      float(np.mean(np.cos(ang))))


def verify_pattern(traj: Trajectory, eta: ShiftField, T: float,
                   component: int = 0, threshold: float = 0.0,
                   t_discard: float = 0.0,
                   reference: tuple = (0, 0)) -> FidelityReport:
    """Compare per-node spike phases against the encoded shift field.

    The measured offset of node (m,n) is (spike time of the node minus
    spike time of the reference node) mod T. The transformation advances
    each node by eta, so the induced offset is (eta_ref - eta) mod T;
    the report gives the circular correlation between measured and induced
    offsets plus the maximum absolute circular deviation. Correlation is
    undefined (None) for a constant shift field.
    """
    if T <= 0:
        raise ValueError("T must be > 0")
    if traj.spikes is None:
        detect_spikes(traj, component=component, threshold=threshold)
    M, N = traj.shape
    if eta.eta.shape != (M, N):
        raise ValueError("shift field shape does not match the trajectory")

    def first_spike(m, n):
        ev = np.asarray(traj.spikes[m][n])
        ev = ev[ev >= t_discard]
        return float(ev[0]) if len(ev) else None

    ref_spike = first_spike(*reference)
    missing = []
    measured = []
    expected = []
    for m in range(M):
        for n in range(N):
            s = first_spike(m, n)
            if s is None:
                missing.append((m, n))
                continue
            if ref_spike is None:
                continue
            measured.append((s - ref_spike) % T)
            expected.append((eta.eta[reference] - eta.eta[m, n]) % T)
    if ref_spike is None or not measured:
        return FidelityReport(correlation=None, max_dev=math.inf,
                              missing_nodes=missing)
    measured = np.array(measured)
    expected = np.array(expected)
    dev = _circular_dist(measured - expected, T)
    corr = _circular_correlation(measured, expected, T)
    return FidelityReport(correlation=corr,
                          max_dev=float(np.max(np.abs(dev))),
                          missing_nodes=missing)
