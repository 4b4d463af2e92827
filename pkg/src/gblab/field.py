"""Expectation values of the four-potential on physical states and the gauge
function that separates them from purely transverse expectations.

Natural units, signature (+, -, -, -), phase k.x = omega t - k.x. The
continuum integral over momenta is replaced by a weighted sum over a
``ModeSet``; each mode keeps the (2 omega (2 pi)^3)^{-1/2} prefactor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .coherent import CoherentSpec
from .fock import (
    FockBasis,
    FockError,
    Mode,
    Polarization,
    State,
    Vec3,
    annihilator,
    as_momentum,
    eta_adjoint,
    number_op,
    physical_inner,
)

MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])
FLIPPED = -MINKOWSKI
FD_TOL = 1e-6
SPLIT_TOL = 1e-8


class FieldError(FockError):
    pass


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z], dtype=float)


def _points_array(points) -> np.ndarray:
    if isinstance(points, SpacetimePoint):
        return points.as_array()[None, :]
    if isinstance(points, np.ndarray):
        arr = np.atleast_2d(points).astype(float)
    else:
        arr = np.array([p.as_array() if isinstance(p, SpacetimePoint) else p for p in points], dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise FieldError(f"expected (n, 4) spacetime points, got shape {arr.shape}")
    return arr


def grid_points(lo: float = 0.0, hi: float = 2 * math.pi, n: int = 5) -> list[SpacetimePoint]:
    """n^4 points on [lo, hi]^4, t slowest."""
    axis = np.linspace(lo, hi, n)
    return [SpacetimePoint(*map(float, p)) for p in np.array(np.meshgrid(axis, axis, axis, axis, indexing="ij")).reshape(4, -1).T]


@dataclass(frozen=True)
class PolarizationBasis:
    """Rows are epsilon^mu(k, lambda) for lambda = 0..3."""

    momentum: Vec3
    vectors: np.ndarray

    def __getitem__(self, lam: int) -> np.ndarray:
        return self.vectors[lam]


def polarization_basis(k) -> PolarizationBasis:
    """Scalar, two transverse and longitudinal polarization four-vectors.

    The first transverse vector is the coordinate axis least aligned with k
    (ties go to x, then y), with its k component removed and normalized; the
    second is k_hat x eps1.
    """
    k = np.array(as_momentum(k))
    omega = float(np.linalg.norm(k))
    if omega == 0:
        raise FieldError("polarization vectors need a nonzero momentum")
    k_hat = k / omega
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(k_hat)))] = 1.0
    e1 = axis - (axis @ k_hat) * k_hat
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(k_hat, e1)
    vecs = np.zeros((4, 4))
    vecs[0, 0] = 1.0
    vecs[1, 1:] = e1
    vecs[2, 1:] = e2
    vecs[3, 1:] = k_hat
    vecs.setflags(write=False)
    return PolarizationBasis(tuple(k.tolist()), vecs)


@dataclass(frozen=True)
class ModeSet:
    """Discrete momenta with quadrature weights standing in for d^3k."""

    momenta: tuple[Vec3, ...]
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        momenta = tuple(as_momentum(k) for k in self.momenta)
        weights = tuple(float(w) for w in self.weights) or (1.0,) * len(momenta)
        if len(weights) != len(momenta):
            raise FieldError("one weight per momentum is required")
        if len(set(momenta)) != len(momenta) or not all(any(k) for k in momenta):
            raise FieldError("momenta must be distinct and nonzero")
        if any(w <= 0 for w in weights):
            raise FieldError("quadrature weights must be positive")
        object.__setattr__(self, "momenta", momenta)
        object.__setattr__(self, "weights", weights)

    def __iter__(self):
        return iter(zip(self.momenta, self.weights))


def mode_prefactor(omega: float) -> float:
    return 1.0 / math.sqrt(2.0 * omega * (2.0 * math.pi) ** 3)


def _phase(k: np.ndarray, omega: float, pts: np.ndarray) -> np.ndarray:
    """k.x = omega t - k.x for each row of ``pts``."""
    return omega * pts[:, 0] - pts[:, 1:] @ k


@dataclass(frozen=True)
class ModeExpectations:
    """<a_{k,lambda}> and <a_{k,lambda}^dag> per momentum, physically normalized."""

    lowering: dict[Vec3, np.ndarray]
    raising: dict[Vec3, np.ndarray]


def mode_expectations(basis: FockBasis, state: State, modeset: ModeSet) -> ModeExpectations:
    """Polarizations absent from the basis are in their vacuum and contribute 0."""
    if set(basis.momenta) != set(modeset.momenta):
        raise FieldError("basis momenta and mode-set momenta differ")
    if state.basis != basis:
        raise FieldError("state lives on another basis")
    norm = physical_inner(state, state)
    if abs(norm) < 1e-300:
        raise FieldError("state has zero physical norm")
    low, high = {}, {}
    for k in modeset.momenta:
        lo = np.zeros(4, dtype=complex)
        hi = np.zeros(4, dtype=complex)
        for lam in range(4):
            mode = Mode(k, Polarization(lam))
            if not basis.has_mode(mode):
                continue
            a = annihilator(basis, mode)
            lo[lam] = physical_inner(state, a @ state) / norm
            hi[lam] = physical_inner(state, eta_adjoint(basis, a) @ state) / norm
        low[k], high[k] = lo, hi
    return ModeExpectations(low, high)


def expect_A_from(expectations: ModeExpectations, modeset: ModeSet, points) -> np.ndarray:
    """<A^mu(x)> for each point, shape (n_points, 4), upper index."""
    pts = _points_array(points)
    total = np.zeros((pts.shape[0], 4), dtype=complex)
    for k, w in modeset:
        pol = polarization_basis(k)
        kv = np.array(k)
        omega = float(np.linalg.norm(kv))
        wave = np.exp(-1j * _phase(kv, omega, pts))
        amp_lo = expectations.lowering[k] @ pol.vectors
        amp_hi = expectations.raising[k] @ pol.vectors
        total += w * mode_prefactor(omega) * (np.outer(wave, amp_lo) + np.outer(wave.conj(), amp_hi))
    imag = float(np.abs(total.imag).max()) if total.size else 0.0
    if imag > 1e-10:
        raise FieldError(f"<A> has imaginary part {imag:.3g}")
    return total.real


def expect_A(basis: FockBasis, state: State, modeset: ModeSet, x) -> np.ndarray:
    """<A^mu(x)> on ``state``; a single SpacetimePoint gives a 4-vector."""
    out = expect_A_from(mode_expectations(basis, state, modeset), modeset, x)
    return out[0] if isinstance(x, SpacetimePoint) else out


def _coherent_terms(spec: CoherentSpec, modeset: ModeSet):
    weights = dict(modeset)
    for k, alpha in zip(spec.momenta, spec.alphas):
        if k not in weights:
            raise FieldError(f"coherent momentum {k} missing from mode set")
        kv = np.array(k)
        omega = float(np.linalg.norm(kv))
        yield kv, omega, alpha, weights[k] * mode_prefactor(omega)


def gauge_lambda(spec: CoherentSpec, modeset: ModeSet, points) -> np.ndarray:
    """Lambda(x) = sum_k w c_k [(i alpha_k / omega_k) e^{-ik.x} + c.c.]."""
    pts = _points_array(points)
    out = np.zeros(pts.shape[0])
    for kv, omega, alpha, c in _coherent_terms(spec, modeset):
        out += 2.0 * c * np.real(1j * alpha / omega * np.exp(-1j * _phase(kv, omega, pts)))
    return out


def gauge_gradient_upper(spec: CoherentSpec, modeset: ModeSet, points) -> np.ndarray:
    """d^mu Lambda = sum_k w c_k [alpha_k (k^mu / omega_k) e^{-ik.x} + c.c.], shape (n, 4)."""
    pts = _points_array(points)
    out = np.zeros((pts.shape[0], 4))
    for kv, omega, alpha, c in _coherent_terms(spec, modeset):
        k_up = np.concatenate([[omega], kv])
        wave = np.real(alpha * np.exp(-1j * _phase(kv, omega, pts)))
        out += 2.0 * c * np.outer(wave, k_up / omega)
    return out


def gauge_function(spec: CoherentSpec, modeset: ModeSet, x) -> tuple[float, np.ndarray]:
    """(Lambda(x), d^mu Lambda(x)) at a single point."""
    return float(gauge_lambda(spec, modeset, x)[0]), gauge_gradient_upper(spec, modeset, x)[0]


def lower(vectors: np.ndarray, metric: np.ndarray = MINKOWSKI) -> np.ndarray:
    return np.asarray(vectors) @ metric


def fd_gradient(f: Callable[[np.ndarray], np.ndarray], points, h: float = 1e-4) -> np.ndarray:
    """Central second-order differences d f / d x^mu (lower index), shape (n, 4)."""
    pts = _points_array(points)
    out = np.empty((pts.shape[0], 4))
    for mu in range(4):
        step = np.zeros(4)
        step[mu] = h
        out[:, mu] = (f(pts + step) - f(pts - step)) / (2 * h)
    return out


def fd_second(f: Callable[[np.ndarray], np.ndarray], pts: np.ndarray, mu: int, h: float) -> np.ndarray:
    step = np.zeros(4)
    step[mu] = h
    return (-f(pts + 2 * step) + 16 * f(pts + step) - 30 * f(pts) + 16 * f(pts - step) - f(pts - 2 * step)) / (12 * h * h)


def fd_box(f: Callable[[np.ndarray], np.ndarray], points, h: float = 1e-2, spatial_ratio: float = 2.0) -> np.ndarray:
    """(d_t^2 - laplacian) f with the five-point stencil on each axis.

    Time step ``h``, spatial step ``spatial_ratio * h``. With equal steps an
    axis-aligned null plane wave satisfies the lattice dispersion relation
    exactly, which hides the discretization error entirely.
    """
    pts = _points_array(points)
    hs = spatial_ratio * h
    return fd_second(f, pts, 0, h) - sum(fd_second(f, pts, mu, hs) for mu in (1, 2, 3))


@dataclass
class BoxCheck:
    step: float
    residual: float
    residual_half: float
    scale: float

    @property
    def relative(self) -> float:
        return self.residual / self.scale if self.scale else self.residual

    @property
    def reduction(self) -> float:
        return self.residual / self.residual_half if self.residual_half else math.inf


def box_lambda_check(spec: CoherentSpec, modeset: ModeSet, points, h: float = 1e-2, spatial_ratio: float = 2.0) -> BoxCheck:
    """Finite-difference wave-operator residual of Lambda at step h and h/2."""
    pts = _points_array(points)
    f = lambda p: gauge_lambda(spec, modeset, p)
    r1 = float(np.abs(fd_box(f, pts, h, spatial_ratio)).max())
    r2 = float(np.abs(fd_box(f, pts, h / 2, spatial_ratio)).max())
    # amplitude bound of Lambda; grid maxima can sit on its zeros
    scale = sum(2.0 * c * abs(alpha) / omega for _, omega, alpha, c in _coherent_terms(spec, modeset))
    return BoxCheck(h, r1, r2, scale)


def gradient_check(spec: CoherentSpec, modeset: ModeSet, points, h: float = 1e-4) -> float:
    """max relative difference between lowered d^mu Lambda and central differences."""
    pts = _points_array(points)
    analytic = lower(gauge_gradient_upper(spec, modeset, pts))
    numeric = fd_gradient(lambda p: gauge_lambda(spec, modeset, p), pts, h)
    scale = float(np.abs(analytic).max())
    return float(np.abs(analytic - numeric).max()) / scale if scale else float(np.abs(numeric).max())


@dataclass
class GaugeSplitReport:
    max_deviation: float
    box: BoxCheck
    gradient_error: float
    metric: np.ndarray
    points: np.ndarray = field(repr=False)
    field_lower: np.ndarray = field(repr=False)
    reference_lower: np.ndarray = field(repr=False)
    gauge_lower: np.ndarray = field(repr=False)

    @property
    def deviations(self) -> np.ndarray:
        return np.abs(self.field_lower - self.reference_lower - self.gauge_lower)

    def rows(self) -> Iterable[dict]:
        dev = self.deviations
        for i, p in enumerate(self.points):
            for mu in range(4):
                yield {
                    "t": p[0], "x": p[1], "y": p[2], "z": p[3], "mu": mu,
                    "A": self.field_lower[i, mu],
                    "A_T": self.reference_lower[i, mu],
                    "dLambda": self.gauge_lower[i, mu],
                    "deviation": dev[i, mu],
                }


def _check_transverse_match(basis: FockBasis, state: State, reference: State):
    for mode in basis.modes:
        if mode.polarization not in (Polarization.TRANSVERSE1, Polarization.TRANSVERSE2):
            continue
        n = number_op(basis, mode)
        a = physical_inner(state, n @ state) / physical_inner(state, state)
        b = physical_inner(reference, n @ reference) / physical_inner(reference, reference)
        if abs(a - b) > 1e-8:
            raise FieldError(f"transverse content differs on {mode}: {a.real:.6g} vs {b.real:.6g}")


def check_gauge_split(
    basis: FockBasis,
    state: State,
    reference: State,
    modeset: ModeSet,
    grid: Sequence[SpacetimePoint] | np.ndarray,
    spec: CoherentSpec,
    metric: np.ndarray = MINKOWSKI,
    fd_step: float = 1e-2,
    spatial_ratio: float = 2.0,
    gradient_step: float = 1e-4,
) -> GaugeSplitReport:
    """Compare <A_mu>_phys - <A_mu>_T with d_mu Lambda on every grid point.

    ``metric`` lowers the index of the field expectations; d_mu Lambda is the
    coordinate derivative of Lambda and does not depend on it. Passing
    ``FLIPPED`` is the negative control.
    """
    _check_transverse_match(basis, state, reference)
    pts = _points_array(grid)
    A = lower(expect_A(basis, state, modeset, pts), metric)
    A_T = lower(expect_A(basis, reference, modeset, pts), metric)
    dL = lower(gauge_gradient_upper(spec, modeset, pts), MINKOWSKI)
    dev = float(np.abs(A - A_T - dL).max())
    box = box_lambda_check(spec, modeset, pts, fd_step, spatial_ratio)
    grad = gradient_check(spec, modeset, pts, gradient_step)
    return GaugeSplitReport(dev, box, grad, metric, pts, A, A_T, dL)


__all__ = [
    "FD_TOL",
    "FLIPPED",
    "MINKOWSKI",
    "SPLIT_TOL",
    "BoxCheck",
    "FieldError",
    "GaugeSplitReport",
    "ModeExpectations",
    "ModeSet",
    "PolarizationBasis",
    "SpacetimePoint",
    "box_lambda_check",
    "check_gauge_split",
    "expect_A",
    "expect_A_from",
    "fd_box",
    "fd_gradient",
    "gauge_function",
    "gauge_gradient_upper",
    "gauge_lambda",
    "gradient_check",
    "grid_points",
    "lower",
    "mode_expectations",
    "mode_prefactor",
    "polarization_basis",
]
