#!/usr/bin/env python3
"""Chiral waves on the droplet boundary and their quantized modes.

Edge excitations are products of r one-way waves, one per boundary
angle.  Their action functional vanishes on solutions, the periodicity
deficit counts the winding, and quantization turns the Fourier data
into oscillator modes with canonical commutators.
"""

import math

import numpy as np

from arstat import (
    EdgeField,
    action_value,
    build_mode_algebra,
    eom_residual,
    evaluate_field,
    hilbert_dimensions,
    mode_commutator_residual,
    periodicity_residual,
    sample_field,
)

# ---- a single right-moving mode -------------------------------------------
field = EdgeField(
    velocities=(1.0,),
    winding=(0.0,),
    zero_mode=(0.0,),
    amplitudes=np.array([[0.5]]),
)
print("single mode, Phi(theta, t) = -sin(theta - t):")
for theta, t in [(0.0, 0.0), (math.pi / 2, 0.0), (math.pi / 2, math.pi / 2)]:
    print(f"  Phi({theta:.3f}, {t:.3f}) = {evaluate_field(field, [theta], t):+.6f}")
print(f"equation-of-motion residual: {eom_residual(field):.2e}")

# corrupt the wave speed inside the phases: the residual jumps to O(1)
print(f"residual at half drift speed: {eom_residual(field.with_drift_scale(0.5)):.3f}")

# winding shows up as a periodicity deficit
wound = EdgeField(
    velocities=(1.0,),
    winding=(2.0,),
    zero_mode=(0.0,),
    amplitudes=np.array([[0.3 + 0.1j]]),
)
print(f"\nwinding 2 periodicity residual: {periodicity_residual(wound):.2e}")

# ---- the boundary action ----------------------------------------------------
times = np.arange(64) * (2 * math.pi / 64)
axes = [np.arange(64) * (2 * math.pi / 64)]
chiral = sample_field(field, axes, times)
print(f"\naction on the chiral solution : {action_value(chiral, [1.0], times):.2e}")

theta = axes[0]
anti = np.cos(theta[None, :] + times[:, None])  # wave moving the wrong way
value = action_value(anti, [1.0], times)
print(f"action on an anti-chiral wave : {value:.6f} "
      f"(closed form {-math.pi * 2 * math.pi:.6f})")

# ---- quantized modes --------------------------------------------------------
algebra = build_mode_algebra(r=2, n_modes=2, level=5, zero_dim=4)
dims = hilbert_dimensions(algebra)
print(f"\nmode space: factors {dims.per_factor}, total dimension {dims.total}")
print(f"canonical commutator residual (interior): {mode_commutator_residual(algebra):.2e}")

vac = np.zeros(algebra.dim)
vac[0] = 1.0
a1 = algebra.alpha(0, 1)
comm = a1 @ algebra.alpha(0, -1) - algebra.alpha(0, -1) @ a1
print(f"<0|[a_1, a_-1]|0> = {np.vdot(vac, comm @ vac).real:.1f}")
