"""su(2) x su(1,1) generators per momentum, the photon Hamiltonian and a
bracket-table verifier.

Transverse photons (lambda = 1, 2) give the su(2) set J, longitudinal and
scalar photons (lambda = 3, 0) the su(1,1) set K. J0 and K0 are the linear
Casimirs of the respective sets.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .fock import (
    FockBasis,
    FockError,
    Mode,
    Operator,
    Polarization,
    Vec3,
    as_momentum,
    commutator,
    eta_adjoint,
    number_op,
    annihilator,
    safe_projector,
)

EXACT_TOL = 1e-12


class GeneratorKind(enum.Enum):
    SU2 = "su2"
    SU11 = "su11"


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    plus: Operator
    minus: Operator
    three: Operator
    zero: Operator
    kind: GeneratorKind
    momentum: Vec3

    def named(self) -> dict[str, Operator]:
        tag = "J" if self.kind is GeneratorKind.SU2 else "K"
        return {f"{tag}+": self.plus, f"{tag}-": self.minus, f"{tag}3": self.three, f"{tag}0": self.zero}


def _mode(basis: FockBasis, k, lam: int) -> Mode:
    mode = Mode(as_momentum(k), Polarization(lam))
    if not basis.has_mode(mode):
        raise FockError(f"basis lacks polarization {lam} at momentum {mode.momentum}")
    return mode


def _bilinear(basis: FockBasis, created: Mode, destroyed: Mode) -> Operator:
    return eta_adjoint(basis, annihilator(basis, created)) @ annihilator(basis, destroyed)


def su2_generators(basis: FockBasis, k) -> GeneratorSet:
    m1, m2 = _mode(basis, k, 1), _mode(basis, k, 2)
    n1, n2 = number_op(basis, m1), number_op(basis, m2)
    return GeneratorSet(
        plus=_bilinear(basis, m1, m2),
        minus=_bilinear(basis, m2, m1),
        three=0.5 * (n1 - n2),
        zero=0.5 * (n1 + n2),
        kind=GeneratorKind.SU2,
        momentum=m1.momentum,
    )


def su11_generators(basis: FockBasis, k) -> GeneratorSet:
    m0, m3 = _mode(basis, k, 0), _mode(basis, k, 3)
    n0, n3 = number_op(basis, m0), number_op(basis, m3)
    return GeneratorSet(
        plus=_bilinear(basis, m3, m0),
        minus=_bilinear(basis, m0, m3),
        three=0.5 * (n0 + n3),
        zero=0.5 * (n0 - n3),
        kind=GeneratorKind.SU11,
        momentum=m0.momentum,
    )


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """H = sum_k omega_k (n_1 + n_2 + n_3 - a_0^dag a_0).

    ``casimir_form`` is sum_k omega_k (J0 - K0) as literally written in terms
    of the Casimirs; it equals H / 2 (see ``casimir_factor``).
    """

    omegas: dict[Vec3, float]
    H: Operator
    casimir_form: Operator

    def casimir_factor(self) -> float:
        """Least-squares c with H ~= c * casimir_form over the diagonal."""
        h = self.H.diagonal().real
        c = self.casimir_form.diagonal().real
        denom = float(c @ c)
        return float(h @ c) / denom if denom else float("nan")

    def casimir_residuals(self) -> dict[str, float]:
        return {
            "H - sum w(J0-K0)": (self.H - self.casimir_form).max_abs(),
            "H - 2 sum w(J0-K0)": (self.H - 2.0 * self.casimir_form).max_abs(),
        }


def hamiltonian(basis: FockBasis) -> HamiltonianSpec:
    H = basis.zero()
    casimir = basis.zero()
    omegas: dict[Vec3, float] = {}
    for k in basis.momenta:
        modes = [_mode(basis, k, lam) for lam in range(4)]
        omega = modes[0].omega
        omegas[k] = omega
        term = number_op(basis, modes[1]) + number_op(basis, modes[2]) + number_op(basis, modes[3])
        H = H + omega * (term - number_op(basis, modes[0]))
        J, K = su2_generators(basis, k), su11_generators(basis, k)
        casimir = casimir + omega * (J.zero - K.zero)
    return HamiltonianSpec(omegas, H, casimir)


@dataclass(frozen=True)
class SpectrumEntry:
    occupation: tuple[int, ...]
    eigenvalue: float
    norm_sign: int


def spectrum(spec: HamiltonianSpec) -> list[SpectrumEntry]:
    """Pair each occupation state with its H eigenvalue and metric sign.

    H is diagonal in the occupation basis, so this reads the diagonal.
    """
    H = spec.H
    if not H.is_diagonal():
        raise FockError("Hamiltonian is not diagonal in the occupation basis")
    basis = H.basis
    diag = H.diagonal()
    signs = basis.metric_signs
    return [
        SpectrumEntry(tuple(int(n) for n in occ), float(diag[i].real), int(signs[i]))
        for i, occ in enumerate(basis.occupations)
    ]


@dataclass
class ResidualReport:
    """Residuals of named identities, each expected to vanish."""

    margin: int
    tolerance: float = EXACT_TOL
    residuals: dict[str, float] = field(default_factory=dict)

    def add(self, name: str, value: float):
        if name in self.residuals:
            raise KeyError(f"duplicate identity {name!r}")
        self.residuals[name] = float(value)

    def passed(self, name: str) -> bool:
        return self.residuals[name] < self.tolerance

    @property
    def all_passed(self) -> bool:
        return all(self.passed(n) for n in self.residuals)

    def failures(self) -> list[str]:
        return [n for n in self.residuals if not self.passed(n)]

    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def to_json(self) -> dict:
        return {n: {"max_residual": r, "pass": self.passed(n)} for n, r in self.residuals.items()}


def _bracket_identities(J: GeneratorSet, K: GeneratorSet, H: Operator) -> Iterable[tuple[str, Operator, Operator]]:
    """(name, lhs, rhs) triples; lhs is a commutator, rhs its expected value."""
    zero = H.basis.zero()
    yield "[J+,J-]=2J3", commutator(J.plus, J.minus), 2.0 * J.three
    yield "[J3,J+]=J+", commutator(J.three, J.plus), J.plus
    yield "[J3,J-]=-J-", commutator(J.three, J.minus), -J.minus
    yield "[K+,K-]=-2K3", commutator(K.plus, K.minus), -2.0 * K.three
    yield "[K3,K+]=K+", commutator(K.three, K.plus), K.plus
    yield "[K3,K-]=-K-", commutator(K.three, K.minus), -K.minus
    for name, gen in (("J+", J.plus), ("J-", J.minus), ("J3", J.three)):
        yield f"[J0,{name}]=0", commutator(J.zero, gen), zero
    for name, gen in (("K+", K.plus), ("K-", K.minus), ("K3", K.three)):
        yield f"[K0,{name}]=0", commutator(K.zero, gen), zero
    for name, gen in {**J.named(), **K.named()}.items():
        yield f"[H,{name}]=0", commutator(H, gen), zero
    for (jn, jg), (kn, kg) in itertools.product(J.named().items(), K.named().items()):
        yield f"[{jn},{kn}]=0", commutator(jg, kg), zero


def verify_algebra(basis: FockBasis, margin: int = 2, tolerance: float = EXACT_TOL) -> ResidualReport:
    """Max-entry residual of every bracket identity after safe projection.

    Identities are evaluated per momentum (suffix ``@k<i>``); with several
    momenta, generators at different momenta must commute.
    """
    P = safe_projector(basis, margin)
    H = hamiltonian(basis).H
    report = ResidualReport(margin=margin, tolerance=tolerance)
    sets = []
    for i, k in enumerate(basis.momenta):
        J, K = su2_generators(basis, k), su11_generators(basis, k)
        sets.append((J, K))
        for name, lhs, rhs in _bracket_identities(J, K, H):
            report.add(f"{name}@k{i}", (P @ (lhs - rhs) @ P).max_abs())
    for (i, (Ji, Ki)), (j, (Jj, Kj)) in itertools.combinations(enumerate(sets), 2):
        worst = 0.0
        for a, b in itertools.product(
            [*Ji.named().values(), *Ki.named().values()], [*Jj.named().values(), *Kj.named().values()]
        ):
            worst = max(worst, (P @ commutator(a, b) @ P).max_abs())
        report.add(f"[G(k{i}),G(k{j})]=0", worst)
    return report


def ladder_commutator_table(basis: FockBasis, k, margin: int = 1) -> dict[tuple[int, int], float]:
    """max |P([a_l, a_l'^dag] + g_ll' I)P| for all 16 polarization pairs at k.

    g = diag(1, -1, -1, -1), so the expected commutator is -g_ll' I.
    """
    g = np.diag([1.0, -1.0, -1.0, -1.0])
    P = safe_projector(basis, margin)
    ident = basis.identity()
    out = {}
    for lam, lam2 in itertools.product(range(4), repeat=2):
        a = annihilator(basis, _mode(basis, k, lam))
        adag = eta_adjoint(basis, annihilator(basis, _mode(basis, k, lam2)))
        resid = commutator(a, adag) + g[lam, lam2] * ident
        out[(lam, lam2)] = (P @ resid @ P).max_abs()
    return out


def is_eta_self_adjoint(A: Operator, tol: float = EXACT_TOL) -> bool:
    return (eta_adjoint(A.basis, A) - A).max_abs() < tol


def simultaneously_diagonal(ops: Iterable[Operator]) -> bool:
    return all(op.is_diagonal() for op in ops)


__all__ = [
    "EXACT_TOL",
    "GeneratorKind",
    "GeneratorSet",
    "HamiltonianSpec",
    "ResidualReport",
    "SpectrumEntry",
    "hamiltonian",
    "is_eta_self_adjoint",
    "ladder_commutator_table",
    "simultaneously_diagonal",
    "spectrum",
    "su11_generators",
    "su2_generators",
    "verify_algebra",
]
