import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gblab.fock import (
    BasisMismatchError,
    FockError,
    Mode,
    Operator,
    Polarization,
    State,
    annihilator,
    build_basis,
    commutator,
    creator,
    eta_adjoint,
    metric,
    mode_metric_sign,
    number_op,
    photon_modes,
    physical_expectation,
    physical_inner,
    projected_residual,
    safe_projector,
)

Z = (0.0, 0.0, 1.0)
G = np.diag([1.0, -1.0, -1.0, -1.0])


def single(lam, n_max=3):
    mode = Mode(Z, Polarization(lam))
    return build_basis([mode], n_max), mode


def test_scalar_lowering_matches_frozen_matrix():
    basis, mode = single(0)
    a0 = annihilator(basis, mode).toarray()
    s2, s3 = math.sqrt(2), math.sqrt(3)
    expected = np.array([
        [0, -1, 0, 0],
        [0, 0, -s2, 0],
        [0, 0, 0, -s3],
        [0, 0, 0, 0],
    ])
    np.testing.assert_allclose(a0, expected, atol=1e-15)
    # the physical adjoint of a_0 is the ordinary raising matrix
    np.testing.assert_allclose(creator(basis, mode).toarray(), np.abs(expected).T, atol=1e-15)


def test_metric_signs_single_scalar_mode():
    basis, _ = single(0)
    np.testing.assert_array_equal(metric(basis).signs, [1, -1, 1, -1])


def test_transverse_metric_is_trivial():
    basis, _ = single(1)
    np.testing.assert_array_equal(metric(basis).signs, [1, 1, 1, 1])


def test_first_mode_is_most_significant():
    basis = build_basis(photon_modes([Z], (0, 3)), 2)
    assert basis.index_of_state([1, 0]) == 3
    assert basis.index_of_state([0, 1]) == 1
    np.testing.assert_array_equal(basis.occupations[5], [1, 2])
    a3 = annihilator(basis, basis.mode(Z, 3))
    out = a3 @ basis.number_state([1, 2])
    expected = math.sqrt(2) * basis.number_state([1, 1]).amplitudes
    np.testing.assert_allclose(out.amplitudes, expected)


def test_scalar_number_operator_is_minus_n():
    basis, mode = single(0, 5)
    diag = number_op(basis, mode).diagonal().real
    np.testing.assert_allclose(diag, -np.arange(6))


@pytest.mark.parametrize("n", range(6))
def test_scalar_number_state_norm_recursive(n):
    # <0| a0^n (a0^dag)^n |0> = (-1)^n n!, built one creator at a time
    basis, mode = single(0, 6)
    psi = basis.vacuum()
    adag = creator(basis, mode)
    for _ in range(n):
        psi = adag @ psi
    assert physical_inner(psi, psi).real == pytest.approx((-1) ** n * math.factorial(n))


def test_ladder_commutators_on_safe_subspace(full4):
    P = safe_projector(full4, 1)
    for lam in range(4):
        for lam2 in range(4):
            a = annihilator(full4, full4.mode(Z, lam))
            adag = creator(full4, full4.mode(Z, lam2))
            resid = P @ (commutator(a, adag) + G[lam, lam2] * full4.identity()) @ P
            assert resid.max_abs() < 1e-12


def test_commutator_fails_at_cutoff_without_projection(full4):
    a = annihilator(full4, full4.mode(Z, 3))
    resid = commutator(a, creator(full4, full4.mode(Z, 3))) - full4.identity()
    assert resid.max_abs() == pytest.approx(full4.n_max + 1)


def test_mode_metric_sign():
    assert mode_metric_sign(Mode(Z, Polarization.SCALAR)) == -1
    assert mode_metric_sign(Mode(Z, Polarization.LONGITUDINAL)) == 1


def random_operator(basis, seed):
    rng = np.random.default_rng(seed)
    n = basis.dimension
    return Operator(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), basis)


def random_state(basis, seed):
    rng = np.random.default_rng(seed)
    return State(rng.normal(size=basis.dimension) + 1j * rng.normal(size=basis.dimension), basis)


SMALL = build_basis(photon_modes([Z], (0, 1, 3)), 2)


def test_metric_squares_to_identity():
    eta = metric(SMALL).as_operator()
    assert (eta @ eta - SMALL.identity()).max_abs() == 0


@given(st.integers(0, 2**32 - 1))
def test_eta_adjoint_is_an_involution(seed):
    A = random_operator(SMALL, seed)
    assert (eta_adjoint(SMALL, eta_adjoint(SMALL, A)) - A).max_abs() < 1e-12


@given(st.integers(0, 2**32 - 1))
def test_eta_adjoint_reverses_products(seed):
    A, B = random_operator(SMALL, seed), random_operator(SMALL, seed + 1)
    lhs = eta_adjoint(SMALL, A @ B)
    rhs = eta_adjoint(SMALL, B) @ eta_adjoint(SMALL, A)
    assert (lhs - rhs).max_abs() < 1e-10


@given(st.integers(0, 2**32 - 1))
def test_eta_adjoint_moves_across_the_physical_product(seed):
    A = random_operator(SMALL, seed)
    phi, psi = random_state(SMALL, seed + 1), random_state(SMALL, seed + 2)
    lhs = physical_inner(phi, A @ psi)
    rhs = physical_inner(eta_adjoint(SMALL, A) @ phi, psi)
    assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))


@given(st.integers(0, 2**32 - 1))
def test_physical_inner_is_hermitian_but_indefinite(seed):
    phi, psi = random_state(SMALL, seed), random_state(SMALL, seed + 1)
    assert physical_inner(phi, psi) == pytest.approx(physical_inner(psi, phi).conjugate())
    assert abs(physical_inner(psi, psi).imag) < 1e-12


def test_single_scalar_photon_has_negative_norm_and_energy(full4, scalar_mode):
    one = creator(full4, scalar_mode) @ full4.vacuum()
    assert physical_inner(one, one).real == -1.0
    H = sum((number_op(full4, full4.mode(Z, lam)) for lam in (1, 2, 3)), full4.zero()) - number_op(full4, scalar_mode)
    assert physical_expectation(one, H).real == 1.0  # normalized by the negative norm
    assert physical_inner(one, H @ one).real == -1.0


def test_projected_residual_and_margin_bounds(full4):
    a = annihilator(full4, full4.mode(Z, 1))
    assert projected_residual(commutator(a, creator(full4, full4.mode(Z, 1))), full4.identity(), 1) < 1e-14
    with pytest.raises(FockError):
        safe_projector(full4, full4.n_max + 1)
    with pytest.raises(FockError):
        safe_projector(full4, -1)


def test_zero_momentum_rejected():
    with pytest.raises(FockError):
        Mode((0, 0, 0), Polarization.SCALAR)


def test_duplicate_modes_rejected():
    mode = Mode(Z, Polarization.SCALAR)
    with pytest.raises(FockError):
        build_basis([mode, mode], 2)


def test_dimension_bound_enforced():
    with pytest.raises(FockError, match="dimension"):
        build_basis(photon_modes([Z, (1, 0, 0)]), 8, dimension_bound=10_000)


def test_operators_on_different_bases_do_not_mix(full4):
    other = build_basis(photon_modes([Z]), 3)
    with pytest.raises(BasisMismatchError):
        annihilator(full4, full4.mode(Z, 0)) + annihilator(other, other.mode(Z, 0))


def test_equal_bases_compare_equal():
    a = build_basis(photon_modes([Z], (0, 3)), 3)
    b = build_basis(photon_modes([Z], (0, 3)), 3)
    assert a == b
    assert (annihilator(a, a.mode(Z, 0)) - annihilator(b, b.mode(Z, 0))).max_abs() == 0


def test_state_amplitudes_are_read_only(full4):
    psi = full4.vacuum()
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 2.0
