"""Chiral boson fields on the droplet boundary and their quantization.

Each component field rides the boundary circle with its own velocity,

    Phi_i(theta, t) = zbar_i - a0_i (theta - e_i t)
                      + i sum_{n != 0} (a_n^i / n) exp(in(theta - e_i t)),

with a_{-n} = conj(a_n) keeping it real and the winding a0_i fixing the
periodicity deficit Phi_i(2pi) - Phi_i(0) = -2pi a0_i.  The boundary
action couples the total angular derivative of the product field to the
chiral combination (d_t + sum_i e_i d_i)Phi, which vanishes pointwise on
solutions, so the action is zero there and nonzero on generic data.

Quantization promotes the Fourier amplitudes to oscillator modes with
[a_n^i, a_m^j] = d_ij d_{n+m,0} and a conjugate zero-mode pair with
[a0, zbar0] = i, realized on truncated factors whose commutators are
exact on interior levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import GridError, InvalidSpec, SizeError

__all__ = [
    "EdgeField",
    "ModeAlgebra",
    "DimensionReport",
    "random_edge_field",
    "evaluate_component",
    "evaluate_field",
    "momentum_component",
    "eom_residual",
    "periodicity_residual",
    "momentum_coefficient_residual",
    "sample_field",
    "action_value",
    "build_mode_algebra",
    "hilbert_dimensions",
    "mode_commutator_residual",
]


@dataclass(frozen=True)
class EdgeField:
    """Mode data of a solution of the boundary theory.

    ``amplitudes[i, n-1]`` holds the positive-frequency coefficient a_n^i
    for n = 1..M; negative modes are its conjugates.  ``drift_scale``
    rescales the wave speed inside the oscillator phases only (1.0 is the
    chiral solution; other values model corrupted data for negative
    controls).  ``boundary_radius`` records N/k and does not enter the
    field values.
    """

    velocities: tuple[float, ...]
    winding: tuple[float, ...]
    zero_mode: tuple[float, ...]
    amplitudes: np.ndarray
    boundary_radius: float = 1.0
    drift_scale: float = 1.0

    def __post_init__(self):
        r = len(self.velocities)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[0] != r:
            raise InvalidSpec(f"amplitudes must have shape (r, M), got {amps.shape}")
        if len(self.winding) != r or len(self.zero_mode) != r:
            raise InvalidSpec("winding and zero_mode must have one entry per component")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def r(self) -> int:
        return len(self.velocities)

    @property
    def n_modes(self) -> int:
        return self.amplitudes.shape[1]

    def with_drift_scale(self, scale: float) -> "EdgeField":
        return EdgeField(
            velocities=self.velocities,
            winding=self.winding,
            zero_mode=self.zero_mode,
            amplitudes=self.amplitudes,
            boundary_radius=self.boundary_radius,
            drift_scale=scale,
        )


def random_edge_field(r: int, n_modes: int, rng, velocity_scale: float = 1.0) -> EdgeField:
    """Random mode data with the reality constraint built in."""
    amps = rng.normal(size=(r, n_modes)) + 1j * rng.normal(size=(r, n_modes))
    return EdgeField(
        velocities=tuple(velocity_scale * rng.uniform(0.5, 2.0, size=r)),
        winding=tuple(rng.normal(size=r)),
        zero_mode=tuple(rng.normal(size=r)),
        amplitudes=0.5 * amps,
    )


def _oscillator_sum(field: EdgeField, i: int, phase: np.ndarray) -> np.ndarray:
    # 2 Re[ i sum_n (a_n/n) e^{in phase} ]
    total = np.zeros_like(phase, dtype=float)
    for n in range(1, field.n_modes + 1):
        coeff = 1j * field.amplitudes[i, n - 1] / n
        total += 2.0 * np.real(coeff * np.exp(1j * n * phase))
    return total


def evaluate_component(field: EdgeField, i: int, theta, t: float):
    """One real component Phi_i(theta, t); theta may be an array."""
    theta = np.asarray(theta, dtype=float)
    e = field.velocities[i]
    phase = theta - field.drift_scale * e * t
    winding_part = field.zero_mode[i] - field.winding[i] * (theta - e * t)
    return winding_part + _oscillator_sum(field, i, phase)


def evaluate_field(field: EdgeField, thetas, t: float) -> float:
    """Product field Phi = Phi_1 ... Phi_r at one point of the torus."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if thetas.shape != (field.r,):
        raise InvalidSpec(f"need {field.r} angles, got shape {thetas.shape}")
    value = 1.0
    for i in range(field.r):
        value *= float(evaluate_component(field, i, thetas[i], t))
    return value


def momentum_component(field: EdgeField, i: int, theta, t: float):
    """Conjugate momentum a0_i + sum_{n != 0} a_n^i e^{in(theta - e_i t)}."""
    theta = np.asarray(theta, dtype=float)
    phase = theta - field.drift_scale * field.velocities[i] * t
    total = np.full_like(theta, float(field.winding[i]), dtype=float)
    for n in range(1, field.n_modes + 1):
        total += 2.0 * np.real(field.amplitudes[i, n - 1] * np.exp(1j * n * phase))
    return total


def _spectral_theta_derivative(values: np.ndarray, axis: int = -1) -> np.ndarray:
    n = values.shape[axis]
    freqs = np.fft.fftfreq(n, d=1.0 / n)  # integer wavenumbers
    spectrum = np.fft.fft(values, axis=axis)
    shape = [1] * values.ndim
    shape[axis] = n
    return np.real(np.fft.ifft(spectrum * (1j * freqs.reshape(shape)), axis=axis))


def eom_residual(field: EdgeField, n_theta: int = 128, times=None) -> float:
    """max |(d_t + e_i d_theta) Phi_i| over a sampling grid.

    The angular derivative of the oscillator part is spectral (exact for
    finite Fourier data), the winding slope and the time derivative are
    analytic; a field built from the mode expansion returns round-off.
    """
    if times is None:
        times = np.linspace(0.0, 2.0 * math.pi, 7)
    theta = np.arange(n_theta) * (2.0 * math.pi / n_theta)
    worst = 0.0
    for i in range(field.r):
        e = field.velocities[i]
        d = field.drift_scale
        for t in times:
            phase = theta - d * e * t
            osc = _oscillator_sum(field, i, phase)
            dtheta = -field.winding[i] + _spectral_theta_derivative(osc)
            cos_sum = np.zeros_like(theta)
            for n in range(1, field.n_modes + 1):
                cos_sum += 2.0 * np.real(field.amplitudes[i, n - 1] * np.exp(1j * n * phase))
            dt = field.winding[i] * e + d * e * cos_sum
            worst = max(worst, float(np.max(np.abs(dt + e * dtheta))))
    return worst


def periodicity_residual(field: EdgeField, times=None) -> float:
    """max |Phi_i(2pi, t) - Phi_i(0, t) + 2pi winding_i| over sampled times."""
    if times is None:
        times = np.linspace(0.0, 3.0, 7)
    worst = 0.0
    for i in range(field.r):
        for t in times:
            deficit = float(
                evaluate_component(field, i, 2.0 * math.pi, t)
                - evaluate_component(field, i, 0.0, t)
            )
            worst = max(worst, abs(deficit + 2.0 * math.pi * field.winding[i]))
    return worst


def momentum_coefficient_residual(field: EdgeField, n_theta: int = 128, t: float = 0.6) -> float:
    """Coefficient-level check that -d_theta Phi_i reconstructs the momentum.

    The Fourier coefficients of the spectrally differentiated component
    must be the mode amplitudes (with the transport phase at time t) and
    the constant term the winding number.
    """
    theta = np.arange(n_theta) * (2.0 * math.pi / n_theta)
    worst = 0.0
    for i in range(field.r):
        e = field.velocities[i]
        phase0 = -field.drift_scale * e * t
        osc = _oscillator_sum(field, i, theta + phase0)
        minus_dtheta = field.winding[i] - _spectral_theta_derivative(osc)
        coeffs = np.fft.fft(minus_dtheta) / n_theta
        worst = max(worst, abs(coeffs[0] - field.winding[i]))
        for n in range(1, field.n_modes + 1):
            expected = field.amplitudes[i, n - 1] * np.exp(1j * n * phase0)
            worst = max(worst, abs(coeffs[n] - expected))
    return worst


# ------------------------------------------------------------------ action

def sample_field(field: EdgeField, theta_axes, times) -> np.ndarray:
    """Product field sampled on times x theta_1 x ... x theta_r."""
    times = np.asarray(times, dtype=float)
    grids = [np.asarray(axis, dtype=float) for axis in theta_axes]
    if len(grids) != field.r:
        raise InvalidSpec(f"need {field.r} angular axes")
    out = np.empty((len(times),) + tuple(len(g) for g in grids))
    for it, t in enumerate(times):
        slice_val = np.ones(tuple(len(g) for g in grids))
        for i, g in enumerate(grids):
            comp = evaluate_component(field, i, g, t)
            shape = [1] * field.r
            shape[i] = len(g)
            slice_val = slice_val * comp.reshape(shape)
        out[it] = slice_val
    return out


def _check_uniform(axis: np.ndarray, name: str) -> float:
    diffs = np.diff(axis)
    if len(diffs) == 0:
        raise GridError(f"{name} grid needs at least two samples")
    if not np.allclose(diffs, diffs[0], rtol=1e-12, atol=1e-12):
        raise GridError(f"{name} grid is not uniform")
    return float(diffs[0])


def action_value(
    samples: np.ndarray,
    velocities,
    times,
    time_periodic: bool = True,
) -> float:
    """Boundary action of a sampled field history.

    ``samples`` has shape (nt, n_1, ..., n_r) on uniform grids: angular
    axes cover [0, 2pi) (endpoint excluded), and ``times`` covers one
    period [0, T) when ``time_periodic`` (the default; the time
    derivative is then spectral too, otherwise central differences).
    The integrand is -1/2 (L Phi)(d_t Phi + sum_i e_i d_i Phi) with L the
    sum of the angular derivatives; it vanishes pointwise on chiral
    solutions, making the action zero there to quadrature accuracy.

    The angular derivatives are spectral, so the sampled history must be
    genuinely periodic on the torus: a component with nonzero winding is
    multivalued there and belongs to the analytic residual checks, not to
    this sampled functional.
    """
    samples = np.asarray(samples, dtype=float)
    velocities = np.asarray(velocities, dtype=float)
    r = samples.ndim - 1
    if velocities.shape != (r,):
        raise InvalidSpec(f"need {r} velocities for a rank-{samples.ndim} sample array")
    times = np.asarray(times, dtype=float)
    if len(times) != samples.shape[0]:
        raise GridError("times length must match the leading sample axis")
    dt = _check_uniform(times, "time")

    theta_derivs = [
        _spectral_theta_derivative(samples, axis=1 + i) for i in range(r)
    ]
    l_phi = np.sum(theta_derivs, axis=0)

    if time_periodic:
        nt = samples.shape[0]
        period = nt * dt
        freqs = np.fft.fftfreq(nt, d=1.0 / nt) * (2.0 * math.pi / period)
        spectrum = np.fft.fft(samples, axis=0)
        shape = [1] * samples.ndim
        shape[0] = nt
        dt_phi = np.real(np.fft.ifft(spectrum * (1j * freqs.reshape(shape)), axis=0))
    else:
        dt_phi = np.gradient(samples, dt, axis=0)

    chiral = dt_phi + sum(velocities[i] * theta_derivs[i] for i in range(r))
    integrand = -0.5 * l_phi * chiral
    cell = dt * (2.0 * math.pi) ** r / np.prod(samples.shape[1:])
    return float(np.sum(integrand) * cell)


# ------------------------------------------------------------ mode algebra

@dataclass(frozen=True)
class ModeAlgebra:
    """Oscillator realization of the quantized edge modes.

    The Hilbert space is the tensor product over components i of one
    zero-mode factor and one truncated oscillator per n = 1..M.  On that
    space ``alpha(i, n)`` returns the mode operator (n > 0 lowers,
    n < 0 is the conjugate raiser) and the zero-mode pair obeys
    [alpha0, alphabar0] = i on interior levels.
    """

    r: int
    n_modes: int
    level: int
    zero_dim: int
    dim: int
    _alpha: dict = field(repr=False, hash=False, compare=False)
    _zero: dict = field(repr=False, hash=False, compare=False)
    _interior: sparse.csr_matrix = field(repr=False, hash=False, compare=False)

    def alpha(self, i: int, n: int) -> sparse.csr_matrix:
        if not 0 <= i < self.r:
            raise InvalidSpec(f"component {i} outside 0..{self.r - 1}")
        if n == 0 or abs(n) > self.n_modes:
            raise InvalidSpec(f"mode {n} outside the stored range 1..{self.n_modes}")
        op = self._alpha[(i, abs(n))]
        return op if n > 0 else op.conj().T.tocsr()

    def alpha0(self, i: int) -> sparse.csr_matrix:
        return self._zero[(i, "x")]

    def alphabar0(self, i: int) -> sparse.csr_matrix:
        return self._zero[(i, "p")]

    def interior_projector(self) -> sparse.csr_matrix:
        return self._interior

    @property
    def factor_dims(self) -> list[int]:
        return [self.zero_dim if j % (self.n_modes + 1) == 0 else self.level
                for j in range(self.r * (self.n_modes + 1))]


def _lowering(dim: int) -> sparse.csr_matrix:
    return sparse.diags(np.sqrt(np.arange(1, dim)), offsets=1).tocsr()


def _embed(factor_ops: list, dims: list[int]) -> sparse.csr_matrix:
    """Kron product of per-factor operators (None means identity)."""
    out = None
    for op, dim in zip(factor_ops, dims):
        block = sparse.identity(dim, format="csr", dtype=complex) if op is None else op
        out = block if out is None else sparse.kron(out, block, format="csr")
    return out


def build_mode_algebra(
    r: int, n_modes: int, level: int, zero_dim: int = 8, dim_budget: int = 300_000
) -> ModeAlgebra:
    """Assemble the truncated mode operators on the tensor-product space.

    Needs n_modes >= 1 and level >= 3 (two exact interior levels); raises
    SizeError when the total dimension zero_dim^r * level^(r*n_modes)
    exceeds ``dim_budget``.
    """
    if n_modes < 1:
        raise InvalidSpec("need at least one oscillator mode")
    if level < 3:
        raise InvalidSpec("oscillator truncation needs level >= 3")
    if zero_dim < 3:
        raise InvalidSpec("zero-mode factor needs dimension >= 3")
    dims = []
    for _ in range(r):
        dims.append(zero_dim)
        dims.extend([level] * n_modes)
    total = 1
    for d in dims:
        total *= d
        if total > dim_budget:
            raise SizeError(
                f"tensor dimension exceeds the budget {dim_budget}; "
                f"shrink level, n_modes or zero_dim"
            )

    def factor_index(i: int, slot: int) -> int:
        # slot 0 is the zero mode of component i, slot n >= 1 its n-th mode
        return i * (n_modes + 1) + slot

    alpha = {}
    zero = {}
    for i in range(r):
        b = _lowering(zero_dim)
        x = (b + b.conj().T) / math.sqrt(2.0)
        p = 1j * (b.conj().T - b) / math.sqrt(2.0)
        ops = [None] * len(dims)
        ops[factor_index(i, 0)] = x.astype(complex)
        zero[(i, "x")] = _embed(ops, dims)
        ops[factor_index(i, 0)] = p.astype(complex)
        zero[(i, "p")] = _embed(ops, dims)
        for n in range(1, n_modes + 1):
            ops = [None] * len(dims)
            ops[factor_index(i, n)] = _lowering(level).astype(complex)
            alpha[(i, n)] = _embed(ops, dims)

    interior_masks = [
        (np.arange(d) <= d - 2).astype(complex) for d in dims
    ]
    mask = interior_masks[0]
    for m in interior_masks[1:]:
        mask = np.kron(mask, m)
    interior = sparse.diags(mask).tocsr()

    return ModeAlgebra(
        r=r,
        n_modes=n_modes,
        level=level,
        zero_dim=zero_dim,
        dim=total,
        _alpha=alpha,
        _zero=zero,
        _interior=interior,
    )


@dataclass(frozen=True)
class DimensionReport:
    per_factor: tuple[int, ...]
    total: int


def hilbert_dimensions(algebra: ModeAlgebra) -> DimensionReport:
    """Per-factor and total dimensions; the total is their product."""
    dims = tuple(algebra.factor_dims)
    total = 1
    for d in dims:
        total *= d
    return DimensionReport(per_factor=dims, total=total)


def mode_commutator_residual(algebra: ModeAlgebra) -> float:
    """Worst interior deviation of the canonical mode commutators.

    Checks [alpha_n^i, alpha_m^j] = delta_ij delta_{n+m,0} over all stored
    mode pairs and [alpha0^i, alphabar0^j] = i delta_ij, all compressed to
    the interior levels where truncation cannot leak.
    """
    proj = algebra.interior_projector()
    eye = sparse.identity(algebra.dim, format="csr", dtype=complex)
    worst = 0.0

    def check(a, b, expected_scalar):
        nonlocal worst
        comm = a @ b - b @ a
        residual = proj @ (comm - expected_scalar * eye) @ proj
        if residual.nnz:
            worst = max(worst, float(np.max(np.abs(residual.data))))

    signed = [n for n in range(-algebra.n_modes, algebra.n_modes + 1) if n != 0]
    for i in range(algebra.r):
        for j in range(algebra.r):
            for n in signed:
                for m in signed:
                    expected = 1.0 if (i == j and n + m == 0 and n > 0) else 0.0
                    if i == j and n + m == 0 and n < 0:
                        expected = -1.0
                    check(algebra.alpha(i, n), algebra.alpha(j, m), expected)
            check(algebra.alpha0(i), algebra.alphabar0(j), 1j if i == j else 0.0)
            for n in signed:
                check(algebra.alpha0(i), algebra.alpha(j, n), 0.0)
                check(algebra.alphabar0(i), algebra.alpha(j, n), 0.0)
    return worst
