import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import lambertw as scipy_lambertw

from delaylattice.lambertw import (MAX_BRANCH, LambertWError, lambert_w,
                                   lambert_w_log)


def test_principal_branch_at_zero():
    assert lambert_w(0, 0.0) == 0.0


def test_principal_branch_at_e():
    assert abs(lambert_w(0, cmath.e) - 1.0) < 1e-14


def test_branch_point():
    # W_{-1}(-1/e) = W_0(-1/e) = -1
    assert abs(lambert_w(-1, -1.0 / cmath.e.real) + 1.0) < 1e-12
    assert abs(lambert_w(0, -1.0 / cmath.e.real) + 1.0) < 1e-12


def test_high_branch_residual():
    z = 3.0 + 4.0j
    w = lambert_w(2, z)
    assert abs(w * cmath.exp(w) - z) / abs(z) <= 1e-12


def test_nonzero_branch_rejects_zero():
    with pytest.raises(LambertWError):
        lambert_w(1, 0.0)


def test_branch_cap():
    with pytest.raises(ValueError):
        lambert_w(MAX_BRANCH + 1, 1.0)


def test_matches_scipy_on_sample_grid():
    rng = np.random.default_rng(7)
    for _ in range(200):
        j = int(rng.integers(-5, 6))
        z = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
        if abs(z) < 1e-3:
            continue
        ours = lambert_w(j, z)
        ref = complex(scipy_lambertw(z, k=j))
        assert abs(ours - ref) <= 1e-9 * (1.0 + abs(ref))


def test_branch_imaginary_part_convention():
    # Im W_j lies in the branch strip (2*pi*j - pi, 2*pi*j + pi]
    z = 1e6 + 0.0j
    for j in (-3, -1, 0, 1, 3):
        w = lambert_w(j, z)
        assert abs(w.imag - 2.0 * cmath.pi * j) < cmath.pi


def test_log_form_agrees_with_direct_form():
    # moderate arguments: both entry points must coincide
    rng = np.random.default_rng(11)
    for _ in range(50):
        j = int(rng.integers(-4, 5))
        log_z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        a = lambert_w_log(j, log_z)
        b = lambert_w(j, cmath.exp(log_z))
        assert abs(a - b) <= 1e-10 * (1.0 + abs(b))


def test_log_form_beyond_double_overflow():
    # z = exp(800) overflows a double; the log form must still solve
    # w + log w = log z to high accuracy on several branches
    for j in (-2, 0, 3):
        for log_z in (800.0 + 0.3j, 2000.0 - 1.0j):
            w = lambert_w_log(j, log_z)
            resid = w + cmath.log(w) - (log_z + 2j * cmath.pi * j)
            assert abs(resid) <= 1e-10 * abs(log_z)
            assert abs(w.real - log_z.real) < 0.05 * log_z.real


@settings(max_examples=200, deadline=None)
@given(j=st.integers(min_value=-8, max_value=8),
       re=st.floats(-20, 20), im=st.floats(-20, 20))
def test_defining_identity_property(j, re, im):
    z = complex(re, im)
    if abs(z) < 1e-6:
        return
    w = lambert_w(j, z)
    assert abs(w * cmath.exp(w) - z) / max(abs(z), 1.0) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(j=st.integers(min_value=-6, max_value=6),
       re=st.floats(-10, 10), im=st.floats(0.1, 10))
def test_conjugate_symmetry(j, re, im):
    # off the real axis (hence off the branch cut)
    z = complex(re, im)
    w1 = lambert_w(-j, z.conjugate())
    w2 = lambert_w(j, z).conjugate()
    assert abs(w1 - w2) <= 1e-10 * (1.0 + abs(w2))
