#!/usr/bin/env python3
"""Droplet densities and the sharp-step limit of their Husimi profiles.

A droplet is the projector onto all states with total occupancy <= N.
Its coherent-state expectation depends only on rho = |z|^2 and is an
exact distribution function; as k and N grow together it approaches a
unit step that drops at mean occupancy N, with width ~ sqrt(N).
"""

import numpy as np

from arstat import (
    DropletSpec,
    StatisticsSpec,
    density_operator,
    droplet_profile,
    enumerate_basis,
    husimi,
    husimi_from_matrix,
    step_profile_check,
)
from arstat.droplet import rho_from_mean_occupation

# ---- desk scale: the matrix and series paths agree -----------------------
spec = StatisticsSpec(r=2, s=-1, k=6)
basis = enumerate_basis(spec)
dspec = DropletSpec(spec, N=3)
rho0 = density_operator(dspec, basis)
print(f"droplet projector: trace = {np.trace(rho0.toarray()).real:.0f} "
      f"(states with n_tot <= {dspec.N})")

z = np.array([0.5, 0.3 + 0.4j])
print(f"husimi at z: series {husimi(dspec, z):.12f}, "
      f"matrix {husimi_from_matrix(dspec, basis, z):.12f}")

# ---- the step limit -------------------------------------------------------
for s, label in [(+1, "bosonic"), (-1, "fermionic")]:
    print(f"\n{label} droplet, k = 400, N = 200:")
    spec = StatisticsSpec(r=1, s=s, k=400 if s == -1 else 400.0,
                          n_max=800 if s == +1 else None)
    dspec = DropletSpec(spec, N=200)
    check = step_profile_check(dspec)
    print(f"  value at mean occupancy N/2   : {check.value_inside:.6f}")
    print(f"  value at mean occupancy N-1/2 : {check.value_mid:.6f}")
    print(f"  value at mean occupancy 3N/2  : {check.value_outside:.2e}")
    print(f"  half-height crossing          : {check.crossing_mu:.2f} (N = 200)")
    print(f"  transition width (0.9 -> 0.1) : {check.width_mu:.2f} ~ sqrt(N)")

# a short profile table in both radial coordinates
spec = StatisticsSpec(r=1, s=+1, k=200.0, n_max=400)
dspec = DropletSpec(spec, N=100)
mus = np.array([25.0, 50.0, 90.0, 100.0, 110.0, 150.0])
rhos = np.array([rho_from_mean_occupation(spec, mu) for mu in mus])
profile = droplet_profile(dspec, rhos)
print("\n  mean_occ     rho      value")
for mu, rho, val in zip(profile.mean_occ, profile.rho, profile.value):
    print(f"  {mu:8.1f}  {rho:.4f}  {val:.6f}")
