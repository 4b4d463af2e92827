"""Coherent states of longitudinal and scalar photons and the Gupta-Bleuler
condition they satisfy.

Both polarizations at momentum k share one amplitude alpha_k:

    a_3 |alpha> = alpha |alpha>,   a_0 |alpha> = alpha |alpha>

so ``L_k = a_0 - a_3`` annihilates the pair state. Two constructions are
provided: a finite polynomial in creation operators applied to the vacuum
(``coherent_state_series``) and inverse displacement operators acting on the
vacuum (``coherent_state_displaced``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .algebra import ResidualReport
from .fock import (
    FockBasis,
    FockError,
    Mode,
    Operator,
    Polarization,
    State,
    Vec3,
    annihilator,
    as_momentum,
    eta_adjoint,
    safe_projector,
)

COHERENT_TOL = 1e-8
DEFAULT_GUARD_FRACTION = 0.25


class TruncationGuardError(FockError):
    """Coherent amplitudes too large for the occupation cutoff."""


@dataclass(frozen=True)
class CoherentSpec:
    """Amplitude alpha_k per momentum, shared by the lambda = 0 and 3 modes."""

    momenta: tuple[Vec3, ...]
    alphas: tuple[complex, ...]
    guard_fraction: float = DEFAULT_GUARD_FRACTION

    def __post_init__(self):
        momenta = tuple(as_momentum(k) for k in self.momenta)
        alphas = tuple(complex(a) for a in self.alphas)
        if len(momenta) != len(alphas):
            raise FockError("one alpha per momentum is required")
        if len(set(momenta)) != len(momenta):
            raise FockError("duplicate momentum in coherent spec")
        if not all(math.isfinite(abs(a)) for a in alphas):
            raise FockError("alpha must be finite")
        object.__setattr__(self, "momenta", momenta)
        object.__setattr__(self, "alphas", alphas)

    @classmethod
    def single(cls, k, alpha: complex, **kw) -> CoherentSpec:
        return cls((as_momentum(k),), (complex(alpha),), **kw)

    def alpha(self, k) -> complex:
        k = as_momentum(k)
        for kk, a in zip(self.momenta, self.alphas):
            if kk == k:
                return a
        return 0j

    @property
    def total_intensity(self) -> float:
        return sum(abs(a) ** 2 for a in self.alphas)

    def check_guard(self, n_max: int):
        limit = n_max * self.guard_fraction
        if self.total_intensity > limit:
            raise TruncationGuardError(
                f"sum |alpha|^2 = {self.total_intensity:.4g} exceeds {self.guard_fraction:g} * n_max = {limit:.4g}"
            )

    def scaled(self, factor: complex) -> CoherentSpec:
        return CoherentSpec(self.momenta, tuple(factor * a for a in self.alphas), self.guard_fraction)


@dataclass(frozen=True)
class PhysicalStateSpec:
    """Transverse occupations (n1, n2) per momentum plus the coherent pair."""

    coherent: CoherentSpec
    transverse: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        trans = tuple(tuple(int(n) for n in pair) for pair in self.transverse)
        if not trans:
            trans = ((0, 0),) * len(self.coherent.momenta)
        if len(trans) != len(self.coherent.momenta):
            raise FockError("transverse occupations must align with coherent momenta")
        if any(len(p) != 2 or min(p) < 0 for p in trans):
            raise FockError(f"bad transverse occupations {trans}")
        object.__setattr__(self, "transverse", trans)

    def transverse_energy(self) -> float:
        return sum(
            math.sqrt(sum(c * c for c in k)) * (n1 + n2)
            for k, (n1, n2) in zip(self.coherent.momenta, self.transverse)
        )

    def with_alpha_zero(self) -> PhysicalStateSpec:
        return PhysicalStateSpec(self.coherent.scaled(0.0), self.transverse)


def expm_taylor(M: np.ndarray, tol: float = 1e-14, max_terms: int = 400) -> np.ndarray:
    """exp(M) by scaling and squaring around a Taylor series.

    Summation stops once the added term's largest entry is below ``tol``.
    """
    M = np.asarray(M, dtype=complex)
    norm = float(np.abs(M).sum(axis=1).max()) if M.size else 0.0
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    X = M / 2.0**squarings
    result = np.eye(M.shape[0], dtype=complex)
    term = result.copy()
    for n in range(1, max_terms + 1):
        term = term @ X / n
        result += term
        if np.abs(term).max() < tol:
            break
    else:
        raise ArithmeticError(f"Taylor series did not converge in {max_terms} terms")
    for _ in range(squarings):
        result = result @ result
    return result


def _pair_modes(basis: FockBasis, k) -> tuple[Mode, Mode]:
    k = as_momentum(k)
    m0 = Mode(k, Polarization.SCALAR)
    m3 = Mode(k, Polarization.LONGITUDINAL)
    if not (basis.has_mode(m0) and basis.has_mode(m3)):
        raise FockError(f"basis lacks the scalar/longitudinal pair at momentum {k}")
    return m0, m3


def pair_momenta(basis: FockBasis) -> list[Vec3]:
    """Momenta for which the basis holds both lambda = 0 and lambda = 3 modes."""
    out = []
    for k in basis.momenta:
        if basis.has_mode(Mode(k, Polarization.SCALAR)) and basis.has_mode(Mode(k, Polarization.LONGITUDINAL)):
            out.append(k)
    return out


def _check_spec(basis: FockBasis, spec: CoherentSpec):
    spec.check_guard(basis.n_max)
    for k in spec.momenta:
        _pair_modes(basis, k)


def _std_lowering(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)


def _local_generator(n_max: int, alpha: complex, polarization: Polarization) -> np.ndarray:
    """Single-mode generator X with G = exp(X).

    lambda=3: alpha* a_3 - alpha a_3^dag;  lambda=0: -alpha* a_0 + alpha a_0^dag.
    With a_0 = -b and a_0^dag = b^T the scalar one becomes alpha* b + alpha b^T.
    """
    b = _std_lowering(n_max)
    if polarization == Polarization.LONGITUDINAL:
        return np.conj(alpha) * b - alpha * b.T
    if polarization == Polarization.SCALAR:
        return np.conj(alpha) * b + alpha * b.T
    raise FockError(f"no displacement generator for polarization {polarization}")


def _displacement(basis: FockBasis, spec: CoherentSpec, polarization: Polarization, inverse: bool) -> Operator:
    _check_spec(basis, spec)
    out = sp.identity(basis.dimension, dtype=complex, format="csr")
    sign = -1.0 if inverse else 1.0
    for k, alpha in zip(spec.momenta, spec.alphas):
        if alpha == 0:
            continue
        mode = Mode(k, polarization)
        local = expm_taylor(sign * _local_generator(basis.n_max, alpha, polarization))
        out = out @ basis.embed(basis.index_of_mode(mode), local)
    return Operator(out, basis)


def displacement_g3(basis: FockBasis, spec: CoherentSpec, inverse: bool = False) -> Operator:
    """G_3(alpha) = exp sum_k (alpha_k* a_k3 - alpha_k a_k3^dag), or its inverse."""
    return _displacement(basis, spec, Polarization.LONGITUDINAL, inverse)


def displacement_g0(basis: FockBasis, spec: CoherentSpec, inverse: bool = False) -> Operator:
    """G_0(alpha) = exp sum_k (-alpha_k* a_k0 + alpha_k a_k0^dag), or its inverse.

    The generator is anti-self-adjoint under the physical adjoint only, so
    G_0 is pseudo-unitary (G_0^dag G_0 = 1) but not unitary.
    """
    return _displacement(basis, spec, Polarization.SCALAR, inverse)


def exponential_margin(n_max: int) -> int:
    """Safe-subspace margin for identities involving displacement exponentials."""
    return n_max // 2


def coherent_mode_vector(n_max: int, alpha: complex, polarization: Polarization) -> np.ndarray:
    """Single-mode coherent amplitudes from the creator series on |0>.

    lambda=3: e^{-|a|^2/2} exp(a a^dag)|0>;  lambda=0: e^{+|a|^2/2} exp(-a a^dag)|0>.
    The creator matrix is the same for both (see fock.annihilator), so the
    series is the same recursion with a flipped coefficient.
    """
    if polarization == Polarization.LONGITUDINAL:
        coef, prefactor = alpha, math.exp(-0.5 * abs(alpha) ** 2)
    elif polarization == Polarization.SCALAR:
        coef, prefactor = -alpha, math.exp(0.5 * abs(alpha) ** 2)
    else:
        raise FockError(f"no coherent state for polarization {polarization}")
    raising = _std_lowering(n_max).T
    vec = np.zeros(n_max + 1, dtype=complex)
    term = np.zeros(n_max + 1, dtype=complex)
    term[0] = 1.0
    vec += term
    for n in range(1, n_max + 1):
        term = (coef / n) * (raising @ term)
        vec += term
    return prefactor * vec


def number_mode_vector(n_max: int, n: int) -> np.ndarray:
    if not 0 <= n <= n_max:
        raise FockError(f"occupation {n} outside 0..{n_max}")
    vec = np.zeros(n_max + 1, dtype=complex)
    vec[n] = 1.0
    return vec


def product_state(basis: FockBasis, local: Mapping[Mode, np.ndarray]) -> State:
    """Tensor product of single-mode vectors; modes not listed are in vacuum."""
    amps = np.ones(1, dtype=complex)
    vac = number_mode_vector(basis.n_max, 0)
    for mode in basis.modes:
        amps = np.kron(amps, local.get(mode, vac))
    return State(amps, basis)


def _pair_total_occupation(basis: FockBasis) -> np.ndarray:
    cols = [i for i, m in enumerate(basis.modes) if m.polarization in (Polarization.SCALAR, Polarization.LONGITUDINAL)]
    return basis.occupations[:, cols].sum(axis=1)


def coherent_state_series(basis: FockBasis, spec: CoherentSpec, order: int | None = None) -> State:
    """|alpha> = exp(sum_k alpha_k (a_k3^dag - a_k0^dag)) |0>, as a finite sum.

    With ``order`` given, only terms of total degree <= order in the creators
    are kept, which is the same as keeping the exponential series in L^dag up
    to that power.
    """
    _check_spec(basis, spec)
    local = {}
    for k, alpha in zip(spec.momenta, spec.alphas):
        m0, m3 = _pair_modes(basis, k)
        local[m0] = coherent_mode_vector(basis.n_max, alpha, Polarization.SCALAR)
        local[m3] = coherent_mode_vector(basis.n_max, alpha, Polarization.LONGITUDINAL)
    state = product_state(basis, local)
    if order is None:
        return state
    if order < 0:
        raise FockError("order must be nonnegative")
    mask = _pair_total_occupation(basis) <= order
    return State(np.where(mask, state.amplitudes, 0.0), basis)


def coherent_state_displaced(basis: FockBasis, spec: CoherentSpec) -> State:
    """G_3^{-1}(alpha) G_0^{-1}(alpha) |0>."""
    G3_inv = displacement_g3(basis, spec, inverse=True)
    G0_inv = displacement_g0(basis, spec, inverse=True)
    return G3_inv @ (G0_inv @ basis.vacuum())


def gupta_bleuler_operator(basis: FockBasis, k) -> Operator:
    """L_k = a_k0 - a_k3."""
    m0, m3 = _pair_modes(basis, k)
    return annihilator(basis, m0) - annihilator(basis, m3)


def gb_residual(basis: FockBasis, state: State) -> float:
    """max_k of the Euclidean norm of L_k |state>.

    The physical norm of L_k|state> vanishes identically, so it cannot tell a
    satisfied condition from a zero-norm violation; the auxiliary Euclidean
    norm can.
    """
    worst = 0.0
    for k in pair_momenta(basis):
        worst = max(worst, (gupta_bleuler_operator(basis, k) @ state).euclidean_norm())
    return worst


def physical_state(basis: FockBasis, spec: PhysicalStateSpec) -> State:
    """prod_k |n_k1> |n_k2> |alpha_k>; momenta absent from the spec stay in vacuum."""
    coh = spec.coherent
    _check_spec(basis, coh)
    local = {}
    for k, alpha, (n1, n2) in zip(coh.momenta, coh.alphas, spec.transverse):
        for lam, n in ((Polarization.TRANSVERSE1, n1), (Polarization.TRANSVERSE2, n2)):
            mode = Mode(k, lam)
            if basis.has_mode(mode):
                local[mode] = number_mode_vector(basis.n_max, n)
            elif n:
                raise FockError(f"occupation {n} requested for {mode}, which the basis lacks")
        m0, m3 = _pair_modes(basis, k)
        local[m0] = coherent_mode_vector(basis.n_max, alpha, Polarization.SCALAR)
        local[m3] = coherent_mode_vector(basis.n_max, alpha, Polarization.LONGITUDINAL)
    return product_state(basis, local)


def _aligned(basis: FockBasis, values: Mapping | Sequence[complex]) -> list[tuple[Vec3, complex]]:
    momenta = pair_momenta(basis)
    if isinstance(values, Mapping):
        out = [(as_momentum(k), complex(v)) for k, v in values.items()]
        for k, _ in out:
            _pair_modes(basis, k)
        return out
    values = list(values)
    if len(values) != len(momenta):
        raise FockError(f"expected {len(momenta)} coefficients, got {len(values)}")
    return [(k, complex(v)) for k, v in zip(momenta, values)]


def r_series_state(
    basis: FockBasis,
    c: Mapping | Sequence[complex],
    order: int,
    base: State | None = None,
    weights: str | Sequence[float] = "unit",
) -> State:
    """R|base> with R = sum_{j<=order} w_j (sum_k c_k L_k^dag)^j.

    ``weights="unit"`` is R as a plain power series in c L^dag;
    ``weights="factorial"`` uses w_j = 1/j!, the exponential pattern.
    ``base`` defaults to the vacuum and must contain no scalar or
    longitudinal photons.
    """
    if not 0 <= order <= basis.n_max:
        raise FockError(f"order must lie in 0..{basis.n_max}, got {order}")
    if isinstance(weights, str):
        if weights == "unit":
            w = [1.0] * (order + 1)
        elif weights == "factorial":
            w = [1.0 / math.factorial(j) for j in range(order + 1)]
        else:
            raise ValueError(f"unknown weights {weights!r}")
    else:
        w = list(weights)
        if len(w) < order + 1:
            raise FockError("not enough weights for the requested order")
    base = basis.vacuum() if base is None else base
    if base.basis != basis:
        raise FockError("base state lives on another basis")
    raising = basis.zero()
    for k, ck in _aligned(basis, c):
        raising = raising + ck * eta_adjoint(basis, gupta_bleuler_operator(basis, k))
    term = base.amplitudes
    total = w[0] * term
    for j in range(1, order + 1):
        term = raising.matrix @ term
        total = total + w[j] * term
    return State(total, basis)


DENSE_LIMIT = 4096


class _PairConjugation:
    """A -> G^{-1} A G with G = G_3(alpha) G_0(alpha)."""

    def __init__(self, basis: FockBasis, spec: CoherentSpec):
        G = displacement_g3(basis, spec) @ displacement_g0(basis, spec)
        G_inv = displacement_g0(basis, spec, inverse=True) @ displacement_g3(basis, spec, inverse=True)
        self.basis = basis
        # G is dense within each displaced mode block; small spaces multiply faster dense
        self.dense = basis.dimension <= DENSE_LIMIT
        if self.dense:
            self.G, self.G_inv = G.toarray(), G_inv.toarray()
        else:
            self.G, self.G_inv = G.matrix, G_inv.matrix

    def __call__(self, A: Operator) -> Operator:
        if self.dense:
            return Operator(self.G_inv @ A.toarray() @ self.G, self.basis)
        return Operator(self.G_inv @ A.matrix @ self.G, self.basis)


def shifted_operator(basis: FockBasis, A: Operator, spec: CoherentSpec) -> Operator:
    """G^{-1} A G with G = G_3(alpha) G_0(alpha)."""
    if A.basis != basis:
        raise FockError("operator lives on another basis")
    return _PairConjugation(basis, spec)(A)


def translation_invariance_check(
    basis: FockBasis, spec: CoherentSpec, margin: int | None = None, tolerance: float = COHERENT_TOL
) -> ResidualReport:
    """Residual of G0^{-1} G3^{-1} L G3 G0 - L (and the same for L^dag)."""
    margin = exponential_margin(basis.n_max) if margin is None else margin
    conjugate = _PairConjugation(basis, spec)
    P = safe_projector(basis, margin)
    report = ResidualReport(margin=margin, tolerance=tolerance)
    for i, k in enumerate(pair_momenta(basis)):
        L = gupta_bleuler_operator(basis, k)
        for name, op in ((f"L@k{i}", L), (f"Ldag@k{i}", eta_adjoint(basis, L))):
            report.add(name, (P @ (conjugate(op) - op) @ P).max_abs())
    return report


__all__ = [
    "COHERENT_TOL",
    "CoherentSpec",
    "PhysicalStateSpec",
    "TruncationGuardError",
    "coherent_mode_vector",
    "coherent_state_displaced",
    "coherent_state_series",
    "displacement_g0",
    "displacement_g3",
    "expm_taylor",
    "exponential_margin",
    "gb_residual",
    "gupta_bleuler_operator",
    "pair_momenta",
    "physical_state",
    "product_state",
    "r_series_state",
    "shifted_operator",
    "translation_invariance_check",
]
