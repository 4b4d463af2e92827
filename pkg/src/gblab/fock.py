"""Truncated multi-mode bosonic Fock spaces with an indefinite metric.

Amplitudes live in an ordinary orthonormal occupation basis. The negative
norm of the scalar (lambda = 0) photon is carried entirely by the diagonal
metric ``eta = (-1)**n_scalar``; the physical adjoint of an operator is
``eta @ A^H @ eta``.

Basis states are ordered lexicographically in the occupation vector, with
the first mode most significant, so single-mode operators embed with
``scipy.sparse.kron`` in mode order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

DEFAULT_DIMENSION_BOUND = 2**22

Vec3 = tuple[float, float, float]


class FockError(ValueError):
    """Invalid basis, mode or operator combination."""


class BasisMismatchError(FockError):
    pass


class Polarization(enum.IntEnum):
    SCALAR = 0
    TRANSVERSE1 = 1
    TRANSVERSE2 = 2
    LONGITUDINAL = 3


def as_momentum(k: Iterable[float]) -> Vec3:
    vec = tuple(float(c) for c in k)
    if len(vec) != 3:
        raise FockError(f"momentum must have 3 components, got {len(vec)}")
    if not all(math.isfinite(c) for c in vec):
        raise FockError(f"momentum components must be finite: {vec}")
    return vec  # type: ignore[return-value]


@dataclass(frozen=True)
class Mode:
    """One oscillator, labelled by momentum and polarization."""

    momentum: Vec3
    polarization: Polarization

    def __post_init__(self):
        k = as_momentum(self.momentum)
        if not any(k):
            raise FockError("zero-momentum modes are not allowed")
        object.__setattr__(self, "momentum", k)
        object.__setattr__(self, "polarization", Polarization(self.polarization))

    @property
    def omega(self) -> float:
        return math.sqrt(sum(c * c for c in self.momentum))

    @property
    def is_scalar(self) -> bool:
        return self.polarization == Polarization.SCALAR


def photon_modes(momenta: Iterable[Iterable[float]], polarizations=(0, 1, 2, 3)) -> list[Mode]:
    """All requested polarizations for each momentum, momentum-major."""
    return [Mode(as_momentum(k), Polarization(lam)) for k in momenta for lam in polarizations]


@dataclass(frozen=True)
class FockBasis:
    modes: tuple[Mode, ...]
    n_max: int

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def local_dim(self) -> int:
        return self.n_max + 1

    @property
    def dimension(self) -> int:
        return self.local_dim**self.n_modes

    @cached_property
    def occupations(self) -> np.ndarray:
        """(dimension, n_modes) integer array, row i = occupation vector of state i."""
        grids = np.indices((self.local_dim,) * self.n_modes, dtype=np.int32)
        occ = grids.reshape(self.n_modes, -1).T
        occ.setflags(write=False)
        return occ

    @cached_property
    def metric_signs(self) -> np.ndarray:
        """(-1)**(total scalar occupation) per basis state."""
        scalar_cols = [i for i, m in enumerate(self.modes) if m.is_scalar]
        n_scalar = self.occupations[:, scalar_cols].sum(axis=1)
        signs = np.where(n_scalar % 2 == 0, 1.0, -1.0)
        signs.setflags(write=False)
        return signs

    @cached_property
    def _mode_index(self) -> dict[Mode, int]:
        return {m: i for i, m in enumerate(self.modes)}

    def index_of_mode(self, mode: Mode) -> int:
        try:
            return self._mode_index[mode]
        except KeyError:
            raise FockError(f"mode {mode} is not in this basis") from None

    def has_mode(self, mode: Mode) -> bool:
        return mode in self._mode_index

    def index_of_state(self, occupation: Sequence[int]) -> int:
        occ = list(occupation)
        if len(occ) != self.n_modes or any(n < 0 or n > self.n_max for n in occ):
            raise FockError(f"occupation {occ} outside basis")
        idx = 0
        for n in occ:
            idx = idx * self.local_dim + n
        return idx

    @property
    def momenta(self) -> list[Vec3]:
        """Distinct momenta in first-appearance order."""
        seen: dict[Vec3, None] = {}
        for m in self.modes:
            seen.setdefault(m.momentum, None)
        return list(seen)

    def mode(self, k: Iterable[float], polarization: int) -> Mode:
        return Mode(as_momentum(k), Polarization(polarization))

    def identity(self) -> Operator:
        return Operator(sp.identity(self.dimension, dtype=complex, format="csr"), self)

    def zero(self) -> Operator:
        return Operator(sp.csr_matrix((self.dimension, self.dimension), dtype=complex), self)

    def vacuum(self) -> State:
        amps = np.zeros(self.dimension, dtype=complex)
        amps[0] = 1.0
        return State(amps, self)

    def number_state(self, occupation: Sequence[int]) -> State:
        amps = np.zeros(self.dimension, dtype=complex)
        amps[self.index_of_state(occupation)] = 1.0
        return State(amps, self)

    def embed(self, mode_index: int, local: sp.spmatrix | np.ndarray) -> sp.csr_matrix:
        """Place a single-mode (n_max+1)-square matrix on mode ``mode_index``."""
        left = self.local_dim**mode_index
        right = self.local_dim ** (self.n_modes - mode_index - 1)
        out = sp.csr_matrix(local, dtype=complex)
        if left > 1:
            out = sp.kron(sp.identity(left, format="csr"), out, format="csr")
        if right > 1:
            out = sp.kron(out, sp.identity(right, format="csr"), format="csr")
        return out

    def __repr__(self):
        return f"FockBasis(n_modes={self.n_modes}, n_max={self.n_max}, dimension={self.dimension})"


def build_basis(
    modes: Sequence[Mode], n_max: int, dimension_bound: int = DEFAULT_DIMENSION_BOUND
) -> FockBasis:
    modes = tuple(modes)
    if not modes:
        raise FockError("at least one mode is required")
    if int(n_max) != n_max or n_max < 1:
        raise FockError(f"n_max must be a positive integer, got {n_max}")
    if len(set(modes)) != len(modes):
        raise FockError("duplicate modes in basis")
    dim = (int(n_max) + 1) ** len(modes)
    if dim > dimension_bound:
        raise FockError(f"basis dimension {dim} exceeds bound {dimension_bound}")
    return FockBasis(modes, int(n_max))


def _check_same(basis: FockBasis, other: FockBasis):
    if basis is not other and basis != other:
        raise BasisMismatchError("objects live on different Fock bases")


@dataclass(frozen=True, eq=False)
class Operator:
    """Sparse complex matrix acting on a FockBasis."""

    matrix: sp.csr_matrix
    basis: FockBasis

    def __post_init__(self):
        mat = sp.csr_matrix(self.matrix, dtype=complex)
        mat.eliminate_zeros()
        if mat.shape != (self.basis.dimension,) * 2:
            raise FockError(f"matrix shape {mat.shape} does not match basis dimension")
        if not np.all(np.isfinite(mat.data)):
            raise FockError("operator has non-finite entries")
        object.__setattr__(self, "matrix", mat)

    def __add__(self, other: Operator) -> Operator:
        _check_same(self.basis, other.basis)
        return Operator(self.matrix + other.matrix, self.basis)

    def __sub__(self, other: Operator) -> Operator:
        _check_same(self.basis, other.basis)
        return Operator(self.matrix - other.matrix, self.basis)

    def __neg__(self) -> Operator:
        return Operator(-self.matrix, self.basis)

    def __mul__(self, scalar: complex) -> Operator:
        return Operator(self.matrix * complex(scalar), self.basis)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Operator):
            _check_same(self.basis, other.basis)
            return Operator(self.matrix @ other.matrix, self.basis)
        if isinstance(other, State):
            _check_same(self.basis, other.basis)
            return State(self.matrix @ other.amplitudes, self.basis)
        return NotImplemented

    @property
    def dag(self) -> Operator:
        return eta_adjoint(self.basis, self)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def max_abs(self) -> float:
        return float(np.abs(self.matrix.data).max()) if self.matrix.nnz else 0.0

    def is_diagonal(self) -> bool:
        coo = self.matrix.tocoo()
        return bool(np.all(coo.row == coo.col))

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()


@dataclass(frozen=True, eq=False)
class State:
    amplitudes: np.ndarray
    basis: FockBasis

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dimension,):
            raise FockError(f"state length {amps.shape} does not match basis dimension")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def __add__(self, other: State) -> State:
        _check_same(self.basis, other.basis)
        return State(self.amplitudes + other.amplitudes, self.basis)

    def __sub__(self, other: State) -> State:
        _check_same(self.basis, other.basis)
        return State(self.amplitudes - other.amplitudes, self.basis)

    def __mul__(self, scalar: complex) -> State:
        return State(self.amplitudes * complex(scalar), self.basis)

    __rmul__ = __mul__

    def euclidean_norm(self) -> float:
        """Norm in the auxiliary positive-definite inner product."""
        return float(np.linalg.norm(self.amplitudes))

    def physical_norm2(self) -> float:
        val = physical_inner(self, self)
        if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
            raise FockError(f"physical norm has imaginary part {val.imag}")
        return val.real


@dataclass(frozen=True, eq=False)
class MetricOperator:
    """Diagonal sign operator, +1/-1 per basis state."""

    signs: np.ndarray
    basis: FockBasis

    def as_operator(self) -> Operator:
        return Operator(sp.diags(self.signs.astype(complex), format="csr"), self.basis)

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.signs * amplitudes


def _lowering(n_max: int, sign: float = 1.0) -> sp.csr_matrix:
    return sp.diags(sign * np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1, format="csr")


def annihilator(basis: FockBasis, mode: Mode) -> Operator:
    """a|n> = sqrt(n)|n-1>, with an extra minus sign for the scalar mode.

    The sign makes the physical adjoint of a_0 the ordinary creator while
    [a_0, a_0^dag] = -1.
    """
    idx = basis.index_of_mode(mode)
    local = _lowering(basis.n_max, -1.0 if mode.is_scalar else 1.0)
    return Operator(basis.embed(idx, local), basis)


def creator(basis: FockBasis, mode: Mode) -> Operator:
    return eta_adjoint(basis, annihilator(basis, mode))


def metric(basis: FockBasis) -> MetricOperator:
    return MetricOperator(basis.metric_signs, basis)


def eta_adjoint(basis: FockBasis, A: Operator) -> Operator:
    _check_same(basis, A.basis)
    eta = sp.diags(metric(basis).signs, format="csr")
    return Operator(eta @ A.matrix.conj().T @ eta, basis)


def commutator(A: Operator, B: Operator) -> Operator:
    _check_same(A.basis, B.basis)
    return Operator(A.matrix @ B.matrix - B.matrix @ A.matrix, A.basis)


def physical_inner(phi: State, psi: State) -> complex:
    _check_same(phi.basis, psi.basis)
    eta = metric(phi.basis)
    return complex(np.vdot(phi.amplitudes, eta.apply(psi.amplitudes)))


def physical_expectation(state: State, A: Operator) -> complex:
    """<psi|A|psi> / <psi|psi> in the indefinite product."""
    return physical_inner(state, A @ state) / physical_inner(state, state)


def number_op(basis: FockBasis, mode: Mode) -> Operator:
    a = annihilator(basis, mode)
    return eta_adjoint(basis, a) @ a


def safe_projector(basis: FockBasis, margin: int) -> Operator:
    """Diagonal projector onto states with every occupation <= n_max - margin."""
    if margin < 0 or margin > basis.n_max:
        raise FockError(f"margin {margin} outside 0..{basis.n_max}")
    keep = np.all(basis.occupations <= basis.n_max - margin, axis=1)
    return Operator(sp.diags(keep.astype(complex), format="csr"), basis)


def project(A: Operator, P: Operator) -> Operator:
    return P @ A @ P


def projected_residual(A: Operator, B: Operator, margin: int) -> float:
    """max |P (A - B) P| entry."""
    P = safe_projector(A.basis, margin)
    return project(A - B, P).max_abs()


def mode_metric_sign(mode: Mode) -> int:
    """sigma in P [a, a^dag] P = sigma P: -1 for scalar photons."""
    return -1 if mode.is_scalar else 1


__all__ = [
    "DEFAULT_DIMENSION_BOUND",
    "BasisMismatchError",
    "FockBasis",
    "FockError",
    "MetricOperator",
    "Mode",
    "Operator",
    "Polarization",
    "State",
    "annihilator",
    "as_momentum",
    "build_basis",
    "commutator",
    "creator",
    "eta_adjoint",
    "metric",
    "mode_metric_sign",
    "number_op",
    "photon_modes",
    "physical_expectation",
    "physical_inner",
    "projected_residual",
    "safe_projector",
]
