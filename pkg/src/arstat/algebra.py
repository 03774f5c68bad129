"""Fock representations of the generalized A_r ladder algebra.

The family is labelled by a sign s (+1 bosonic, -1 fermionic) and a real
parameter k.  The r creation/annihilation pairs act on occupation states
through the quadratic structure function

    F_i(n) = n_i * (k - (1+s)/2 + s * (n_1 + ... + n_r)),

every transition |n> <-> |n + e_i> carrying the amplitude sqrt(F_i(n + e_i)).
For s = -1 the chain terminates exactly at total occupancy k - 1, so the
Fock space is finite; for s = +1 it is infinite and a total-occupancy
truncation n_max is mandatory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy import sparse

from .errors import InvalidSpec, ModeOutOfRange

__all__ = [
    "StatisticsSpec",
    "FockBasis",
    "OperatorMatrix",
    "HamiltonianSpec",
    "LadderOperators",
    "RelationReport",
    "ResidualNorms",
    "enumerate_basis",
    "structure_function",
    "ladder_matrices",
    "number_operator",
    "verify_triple_relations",
    "hamiltonian",
    "hamiltonian_from_commutators",
    "commutator_deviation",
    "large_k_commutator_deviation",
    "fermionic_dimension",
    "spectral_norm_estimate",
    "max_abs_entry",
]


@dataclass(frozen=True)
class StatisticsSpec:
    """One representation family: mode count r, sign s, label k, truncation.

    Admissibility: 2k - 1 > s always; for s = -1 the label k must be an
    integer >= 2 (the raising chain then terminates with exactly zero
    amplitude); for s = +1 the Fock space is infinite and ``n_max`` gives
    the total-occupancy truncation of every matrix built from this spec.
    """

    r: int
    s: int
    k: float
    n_max: int | None = None

    def __post_init__(self):
        if self.r < 1 or int(self.r) != self.r:
            raise InvalidSpec(f"mode count r must be a positive integer, got {self.r}")
        if self.s not in (+1, -1):
            raise InvalidSpec(f"sign s must be +1 or -1, got {self.s}")
        if not 2 * self.k - 1 > self.s:
            raise InvalidSpec(f"label k={self.k} violates 2k - 1 > s for s={self.s}")
        if self.s == -1:
            if self.k != int(self.k):
                raise InvalidSpec(f"fermionic family needs integer k, got {self.k}")
            if self.k < 2:
                raise InvalidSpec(f"fermionic family needs k >= 2, got {self.k}")
        else:
            if self.n_max is None:
                raise InvalidSpec("bosonic family needs a finite truncation n_max")
            if self.n_max < 0 or int(self.n_max) != self.n_max:
                raise InvalidSpec(f"n_max must be a non-negative integer, got {self.n_max}")

    @property
    def total_cap(self) -> int:
        """Largest admissible total occupancy (k - 1 fermionic, n_max bosonic)."""
        if self.s == -1:
            return int(self.k) - 1
        return int(self.n_max)

    @property
    def kappa(self) -> float:
        """The recurring scale k + s/2 - 1/2 = (2k + s - 1)/2."""
        return (2.0 * self.k + self.s - 1.0) / 2.0


def is_admissible(spec: StatisticsSpec, occ: Sequence[int]) -> bool:
    if len(occ) != spec.r or any(n < 0 for n in occ):
        return False
    return sum(occ) <= spec.total_cap


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    # leading mode descending, so (2,0) precedes (1,1) precedes (0,2)
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def fermionic_dimension(r: int, k: int) -> int:
    """Closed-form state count (k-1+r)! / ((k-1)! r!) of the s=-1 family."""
    return math.comb(k - 1 + r, r)


@dataclass(frozen=True)
class FockBasis:
    """Deterministically ordered occupation basis for one spec.

    States are graded by total occupancy; within a grade the leading mode
    descends, matching the enumeration used throughout the worked examples.
    """

    spec: StatisticsSpec
    states: tuple[tuple[int, ...], ...]
    index: dict = field(repr=False, hash=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def state_index(self, occ: Sequence[int]) -> int:
        return self.index[tuple(occ)]

    def grades(self) -> np.ndarray:
        """Total occupancy of each basis state, in basis order."""
        return np.array([sum(n) for n in self.states], dtype=int)

    def grade_projector(self, cap: int) -> sparse.csr_matrix:
        """Diagonal projector onto states with total occupancy <= cap."""
        diag = (self.grades() <= cap).astype(complex)
        return sparse.diags(diag).tocsr()

    def unit_vector(self, occ: Sequence[int]) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=complex)
        vec[self.state_index(occ)] = 1.0
        return vec


def enumerate_basis(spec: StatisticsSpec) -> FockBasis:
    """List every admissible occupation vector exactly once.

    For s = -1 the count equals the closed-form dimension
    (k-1+r)!/((k-1)! r!); for s = +1 it is the stars-and-bars count of
    occupations with total <= n_max.
    """
    states = []
    for total in range(spec.total_cap + 1):
        states.extend(_compositions(total, spec.r))
    states = tuple(states)
    index = {occ: i for i, occ in enumerate(states)}
    return FockBasis(spec=spec, states=states, index=index)


def structure_function(spec: StatisticsSpec, occ: Sequence[int], mode: int) -> float:
    """Squared ladder matrix element F_mode evaluated at occupation ``occ``.

    ``occ`` is the upper state of the transition it controls, so the value
    is 0 exactly when occ[mode] = 0 and, for s = -1, exactly when the total
    occupancy reaches k (the exclusion boundary).  Modes are 0-based.
    """
    if not 0 <= mode < spec.r:
        raise ModeOutOfRange(f"mode {mode} outside 0..{spec.r - 1}")
    if len(occ) != spec.r:
        raise InvalidSpec(f"occupation has {len(occ)} entries, expected {spec.r}")
    if any(n < 0 for n in occ):
        raise InvalidSpec(f"negative occupation in {occ}")
    n_tot = sum(occ)
    return 0.5 * occ[mode] * (2.0 * spec.k - (1 + spec.s) + 2.0 * spec.s * n_tot)


@dataclass(frozen=True)
class OperatorMatrix:
    """Sparse complex operator over an enumerated Fock basis."""

    matrix: sparse.csr_matrix
    basis: FockBasis
    hermitian: bool = False

    def __post_init__(self):
        if self.matrix.shape != (self.basis.dim, self.basis.dim):
            raise InvalidSpec("operator shape does not match basis dimension")

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.matrix.conj().T.tocsr(), self.basis, self.hermitian)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix((self.matrix @ other.matrix).tocsr(), self.basis)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix((self.matrix + other.matrix).tocsr(), self.basis)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix((self.matrix - other.matrix).tocsr(), self.basis)

    def __mul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix((self.matrix * scalar).tocsr(), self.basis)

    __rmul__ = __mul__


@dataclass(frozen=True)
class LadderOperators:
    """The r annihilation/creation pairs realised on a FockBasis."""

    basis: FockBasis
    minus: tuple[OperatorMatrix, ...]
    plus: tuple[OperatorMatrix, ...]


def ladder_matrices(basis: FockBasis) -> LadderOperators:
    """Build a_i^- and a_i^+ = (a_i^-)^dagger as sparse matrices.

    Each column holds at most one entry.  A raise that would leave the
    admissible set (past the s=-1 exclusion cap, or past n_max for s=+1)
    contributes nothing; for s=-1 the amplitude there is exactly zero
    anyway, so truncation is exact on the whole space.
    """
    spec = basis.spec
    minus, plus = [], []
    for i in range(spec.r):
        rows, cols, vals = [], [], []
        for col, occ in enumerate(basis.states):
            if occ[i] == 0:
                continue
            target = list(occ)
            target[i] -= 1
            amp = math.sqrt(structure_function(spec, occ, i))
            rows.append(basis.state_index(target))
            cols.append(col)
            vals.append(amp)
        a = sparse.csr_matrix(
            (np.array(vals, dtype=complex), (rows, cols)),
            shape=(basis.dim, basis.dim),
        )
        minus.append(OperatorMatrix(a, basis))
        plus.append(OperatorMatrix(a.conj().T.tocsr(), basis))
    return LadderOperators(basis=basis, minus=tuple(minus), plus=tuple(plus))


def number_operator(basis: FockBasis, mode: int) -> OperatorMatrix:
    """Diagonal occupancy operator for one mode."""
    if not 0 <= mode < basis.spec.r:
        raise ModeOutOfRange(f"mode {mode} outside 0..{basis.spec.r - 1}")
    diag = np.array([occ[mode] for occ in basis.states], dtype=complex)
    return OperatorMatrix(sparse.diags(diag).tocsr(), basis, hermitian=True)


def max_abs_entry(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def spectral_norm_estimate(a: np.ndarray, iters: int = 40) -> float:
    """2-norm via power iteration on A^H A with a fixed start vector.

    Deterministic by construction (all-ones start), good to a few digits,
    which is plenty for residuals that are either ~1e-16 or O(1).
    """
    a = np.asarray(a)
    if a.size == 0 or not np.any(a):
        return 0.0
    v = np.ones(a.shape[1], dtype=complex) / math.sqrt(a.shape[1])
    for _ in range(iters):
        w = a.conj().T @ (a @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
    return float(np.linalg.norm(a @ v))


@dataclass(frozen=True)
class ResidualNorms:
    """Residual size in the spectral estimate and the max-entry norm."""

    spectral: float
    max_abs: float


@dataclass(frozen=True)
class RelationReport:
    """Worst-case residuals of the defining triple relations.

    ``triple_raise`` covers [[a_i^+, a_j^-], a_k^+] + s d_jk a_i^+ + s d_ij a_k^+,
    ``triple_lower`` covers [[a_i^+, a_j^-], a_k^-] - s d_ik a_j^- - s d_ij a_k^-,
    ``mutual_commute`` covers [a_i^-, a_j^-] and [a_i^+, a_j^+].
    For s=+1 the residual operators are restricted to columns from the
    interior subspace (total occupancy <= n_max - 2), where truncation
    cannot contaminate the identity.
    """

    spec: StatisticsSpec
    interior_cap: int
    triple_raise: ResidualNorms
    triple_lower: ResidualNorms
    mutual_commute: ResidualNorms

    @property
    def max_residual(self) -> float:
        return max(
            self.triple_raise.spectral,
            self.triple_lower.spectral,
            self.mutual_commute.spectral,
        )


def _comm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def verify_triple_relations(basis: FockBasis, ladders: LadderOperators | None = None) -> RelationReport:
    """Measure how well the realised operators satisfy the triple relations."""
    spec = basis.spec
    if ladders is None:
        ladders = ladder_matrices(basis)
    am = [op.toarray() for op in ladders.minus]
    ap = [op.toarray() for op in ladders.plus]
    s = spec.s
    r = spec.r

    if spec.s == +1:
        interior_cap = spec.total_cap - 2
    else:
        interior_cap = spec.total_cap
    proj = basis.grade_projector(interior_cap).toarray()

    worst_raise = ResidualNorms(0.0, 0.0)
    worst_lower = ResidualNorms(0.0, 0.0)
    worst_mutual = ResidualNorms(0.0, 0.0)

    def update(current: ResidualNorms, residual: np.ndarray) -> ResidualNorms:
        restricted = residual @ proj
        spec_norm = spectral_norm_estimate(restricted)
        entry_norm = max_abs_entry(restricted)
        if spec_norm > current.spectral or entry_norm > current.max_abs:
            return ResidualNorms(
                max(spec_norm, current.spectral), max(entry_norm, current.max_abs)
            )
        return current

    for i in range(r):
        for j in range(r):
            inner = _comm(ap[i], am[j])
            for k in range(r):
                res_raise = _comm(inner, ap[k]) + s * (j == k) * ap[i] + s * (i == j) * ap[k]
                res_lower = _comm(inner, am[k]) - s * (i == k) * am[j] - s * (i == j) * am[k]
                worst_raise = update(worst_raise, res_raise)
                worst_lower = update(worst_lower, res_lower)
            worst_mutual = update(worst_mutual, _comm(am[i], am[j]))
            worst_mutual = update(worst_mutual, _comm(ap[i], ap[j]))

    return RelationReport(
        spec=spec,
        interior_cap=interior_cap,
        triple_raise=worst_raise,
        triple_lower=worst_lower,
        mutual_commute=worst_mutual,
    )


@dataclass(frozen=True)
class HamiltonianSpec:
    """Ground offset e0 and per-mode energies e_1..e_r."""

    e0: float
    e: tuple[float, ...]

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.e0, *self.e)):
            raise InvalidSpec("Hamiltonian energies must be finite")


def energy_shift(spec: StatisticsSpec) -> float:
    """Constant added to each mode Hamiltonian so the vacuum sits at zero.

    Fixed by requiring h_i |0> = 0, which makes the spectrum exactly
    e0 + sum_i e_i n_i.
    """
    return -(2.0 * spec.k * spec.s - spec.s + 1.0) / (2.0 * spec.r + 2.0)


def hamiltonian(basis: FockBasis, hspec: HamiltonianSpec) -> OperatorMatrix:
    """Faithful matrix of H = e0 + sum_i e_i h_i on the enumerated basis.

    H is diagonal with entry e0 + sum_i e_i n_i on state n.  This is the
    exact compression of the mode Hamiltonians to the retained basis; for
    the truncated bosonic family it is what the commutator assembly of
    ``hamiltonian_from_commutators`` produces on interior states, without
    the truncation artifact in the top occupancy layer.
    """
    spec = basis.spec
    if len(hspec.e) != spec.r:
        raise InvalidSpec(f"need {spec.r} mode energies, got {len(hspec.e)}")
    diag = np.array(
        [hspec.e0 + sum(ei * ni for ei, ni in zip(hspec.e, occ)) for occ in basis.states],
        dtype=complex,
    )
    return OperatorMatrix(sparse.diags(diag).tocsr(), basis, hermitian=True)


def hamiltonian_from_commutators(
    basis: FockBasis, hspec: HamiltonianSpec, ladders: LadderOperators | None = None
) -> OperatorMatrix:
    """Assemble H from the ladder commutators, as a cross-check path.

    Each h_i = s/(r+1) * [ (r+1)[a_i^-, a_i^+] - sum_j [a_j^-, a_j^+] ] + c
    with the vacuum-calibrated shift c.  Exact on the whole fermionic space;
    for s=+1 the truncated raising operators corrupt the commutators on the
    top layer, so agreement with ``hamiltonian`` holds on total occupancy
    <= n_max - 1 only.
    """
    spec = basis.spec
    if len(hspec.e) != spec.r:
        raise InvalidSpec(f"need {spec.r} mode energies, got {len(hspec.e)}")
    if ladders is None:
        ladders = ladder_matrices(basis)
    comms = [
        (ladders.minus[j].matrix @ ladders.plus[j].matrix
         - ladders.plus[j].matrix @ ladders.minus[j].matrix).tocsr()
        for j in range(spec.r)
    ]
    total = sum(comms[1:], comms[0].copy()) if spec.r > 1 else comms[0]
    eye = sparse.identity(basis.dim, dtype=complex, format="csr")
    c = energy_shift(spec)
    h = hspec.e0 * eye
    for i in range(spec.r):
        h_i = (spec.s / (spec.r + 1.0)) * ((spec.r + 1.0) * comms[i] - total) + c * eye
        h = h + hspec.e[i] * h_i
    return OperatorMatrix(h.tocsr(), basis, hermitian=True)


def commutator_deviation(spec: StatisticsSpec, n_cap: int, ladders: LadderOperators | None = None) -> float:
    """max_ij || P ([a_i^-, a_j^+] - k d_ij) P || / k on total occupancy <= n_cap.

    The deviation is O(n_cap / k): the diagonal part of [a_i^-, a_i^+] is
    k - (1+s)/2 + s(n_tot + 1) + s n_i, and cross-mode commutators stay O(1).
    """
    if spec.s == +1 and spec.n_max < n_cap + 2:
        raise InvalidSpec("bosonic sweep needs n_max >= n_cap + 2")
    if n_cap > spec.total_cap:
        raise InvalidSpec(f"n_cap {n_cap} exceeds the basis cap {spec.total_cap}")
    basis = enumerate_basis(spec)
    if ladders is None:
        ladders = ladder_matrices(basis)
    keep = np.flatnonzero(basis.grades() <= n_cap)
    worst = 0.0
    for i in range(spec.r):
        for j in range(spec.r):
            comm = (ladders.minus[i].matrix @ ladders.plus[j].matrix
                    - ladders.plus[j].matrix @ ladders.minus[i].matrix).toarray()
            if i == j:
                comm -= spec.k * np.eye(basis.dim)
            block = comm[np.ix_(keep, keep)]
            worst = max(worst, float(np.linalg.norm(block, 2)))
    return worst / spec.k


def large_k_commutator_deviation(
    r: int,
    s: int,
    k_values: Sequence[float],
    n_cap: int,
    n_max: int | None = None,
) -> list[tuple[float, float]]:
    """Relative deviation of [a_i^-, a_j^+] from k d_ij along a k sweep.

    ``n_cap`` is held fixed across the sweep; the returned deviations
    decrease like 1/k.  For s=+1 the truncation defaults to n_cap + 2,
    the smallest cap on which the commutator is exact.
    """
    rows = []
    for k in k_values:
        if s == +1:
            spec = StatisticsSpec(r=r, s=s, k=k, n_max=n_max if n_max is not None else n_cap + 2)
        else:
            spec = StatisticsSpec(r=r, s=s, k=k)
        rows.append((float(k), commutator_deviation(spec, n_cap)))
    return rows
