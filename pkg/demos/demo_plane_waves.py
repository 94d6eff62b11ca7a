"""Plane waves of a delay-coupled Stuart-Landau lattice: enumeration,
stability verdicts, and a simulation cross-check.

Delay-coupled lattices carry a huge number of coexisting travelling waves
(the count grows linearly with the delay). This demo enumerates all of
them on a 5x5 torus, classifies a few via the exact Floquet
quasi-polynomial, and integrates one stable wave to confirm it persists.

Run:  python3 demos/demo_plane_waves.py   (about half a minute)
"""

import math

import numpy as np

from delaylattice import (DelayMap, LatticeSpec, Model, SLParams,
                          plane_wave_history, simulate,
                          sl_enumerate_plane_waves, sl_floquet_exact)

ALPHA, BETA, C, TAU = 3.0, 0.5, 2.0, 20.0
spec = LatticeSpec(rows=5, cols=5, model=Model.STUART_LANDAU,
                   params=SLParams(alpha=ALPHA, beta=BETA), coupling=C)

waves = sl_enumerate_plane_waves(spec.params, C, TAU, spec)
asym = 4.0 * C * TAU * 25 / math.pi ** 2
print(f"5x5 lattice, alpha={ALPHA}, C={C}, tau={TAU}:")
print(f"  {len(waves)} coexisting plane waves "
      f"(asymptotic estimate {asym:.0f})\n")

# classify the three highest-amplitude waves and the lowest-amplitude one
waves_by_a = sorted(waves, key=lambda w: -w.a)
sample = waves_by_a[:3] + [waves_by_a[-1]]
print("wave (k1, k2) | amplitude | frequency | verdict   | max growth")
verdicts = []
for w in sample:
    v = sl_floquet_exact(w, spec.params, C, TAU, spec=spec)
    verdicts.append(v)
    print(f"  ({w.wv.k1:4.2f}, {w.wv.k2:4.2f}) |  {w.a:7.4f}  | "
          f"{w.Omega:+7.4f}  | {v.cls.value:<9s} | {v.max_growth:+.4f}")

stable = next(w for w, v in zip(sample, verdicts) if v.max_growth <= 0)
print(f"\nIntegrating the stable wave a={stable.a:.4f} from its exact "
      "profile plus 1e-4 noise ...")
rng = np.random.default_rng(0)
base = plane_wave_history(stable, spec)
noise = 1e-4 * (rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
from delaylattice import FunctionHistory  # noqa: E402
hist = FunctionHistory(lambda t: base.state(t) + noise, base.deriv)
traj = simulate(spec, DelayMap.homogeneous(5, 5, TAU), hist,
                t_end=200.0, dt=0.02, record_every=500)
z = traj.snapshots[-1, ..., 0] + 1j * traj.snapshots[-1, ..., 1]
dev = float(np.max(np.abs(np.abs(z) - stable.a)))
print(f"  after t=200: max amplitude deviation {dev:.2e}  "
      f"(the wave is an attractor)")
