import numpy as np
import pytest

from quasifree import fock
from quasifree.semigroup import QuasifreePair, admissible, generator_action
from quasifree.symplectic import psd_check, symplectic_form
from quasifree.synthesis import (
    HamiltonianTerm,
    LindbladTerm,
    coupling_form,
    decompose,
    dilation_report,
    hamiltonian_action,
    noise_matrix,
    pair_from_coupling,
    reconstruction_residuals,
    spec_from_dict,
    spec_to_dict,
)

from util import rng, random_admissible_pair, random_complex, random_symplectic_generator


def stacked_vector(u, v):
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return np.concatenate([u + np.conj(v), -1j * (u - np.conj(v))])


def textbook_drift_matrix(u, v):
    """The block form often quoted for the drift of a rank-one coupling.

    Documented regression: this matrix is exactly twice the drift demanded by
    generator matching, and only the halved version satisfies the rank-one
    noise identity.
    """
    u = np.asarray(u, dtype=complex).ravel()
    v = np.asarray(v, dtype=complex).ravel()
    ub, vb = np.conj(u), np.conj(v)
    return np.block([
        [-np.real(np.outer(ub - v, u + vb)), -np.imag(np.outer(ub - v, u - vb))],
        [np.imag(np.outer(ub + v, u + vb)), -np.real(np.outer(ub + v, u - vb))],
    ])


# --- the scalar form --------------------------------------------------------

def test_coupling_form_annihilation_only():
    e1 = np.array([1.0])
    assert coupling_form(e1, [0.0], e1) == 1.0


def test_coupling_form_zero():
    assert coupling_form([0.0], [0.0], [0.7 + 0.3j]) == 0.0


def test_coupling_form_real_linear_not_complex_linear():
    gen = rng(51)
    u, v, z = (random_complex(gen, 2) for _ in range(3))
    lhs = coupling_form(u, v, 1j * z)
    rhs = 1j * np.vdot(u, z) - 1j * np.vdot(z, v)
    assert abs(lhs - rhs) < 1e-12
    # complex linearity fails when both u and v are nonzero
    assert abs(lhs - 1j * coupling_form(u, v, z)) > 1e-6


# --- coupling -> pair -------------------------------------------------------

def test_pair_from_coupling_damping():
    K, C = pair_from_coupling([1.0], [0.0])
    assert np.abs(K + 0.5 * np.eye(2)).max() < 1e-15
    assert np.abs(C - np.eye(2)).max() < 1e-15


def test_pair_from_coupling_amplification():
    K, C = pair_from_coupling([0.0], [1.0])
    assert np.abs(K - 0.5 * np.eye(2)).max() < 1e-15
    assert np.abs(C - np.eye(2)).max() < 1e-15


def test_pair_from_coupling_zero():
    K, C = pair_from_coupling([0.0, 0.0], [0.0, 0.0])
    assert np.abs(K).max() == 0.0 and np.abs(C).max() == 0.0


def test_pair_from_coupling_always_admissible():
    gen = rng(52)
    for n in (1, 2, 3):
        for _ in range(10):
            u, v = random_complex(gen, n), random_complex(gen, n)
            K, C = pair_from_coupling(u, v)
            ok, _ = admissible(K, C)
            assert ok


def test_textbook_drift_is_twice_the_matched_one():
    gen = rng(53)
    for n in (1, 2):
        for _ in range(10):
            u, v = random_complex(gen, n), random_complex(gen, n)
            K, _ = pair_from_coupling(u, v)
            assert np.abs(textbook_drift_matrix(u, v) - 2.0 * K).max() < 1e-12


def test_textbook_drift_fails_noise_identity():
    u, v = np.array([1.0 + 0j]), np.array([0.0 + 0j])
    _, C = pair_from_coupling(u, v)
    D_bad = noise_matrix(textbook_drift_matrix(u, v), C)
    outer = np.outer(stacked_vector(u, v), stacked_vector(u, v).conj())
    assert np.abs(D_bad - outer).max() > 0.5
    ok, _ = psd_check(D_bad)
    assert not ok


# --- noise matrix -----------------------------------------------------------

def test_noise_matrix_damping():
    D = noise_matrix(-0.5 * np.eye(2), np.eye(2))
    assert np.abs(D - np.array([[1.0, 1.0j], [-1.0j, 1.0]])).max() < 1e-15


def test_noise_matrix_symplectic_generator_vanishes():
    D = noise_matrix(symplectic_form(1), np.zeros((2, 2)))
    assert np.abs(D).max() < 1e-15


def test_noise_matrix_rank_one_identity():
    gen = rng(54)
    for _ in range(100):
        n = int(gen.integers(1, 3))
        u, v = random_complex(gen, n), random_complex(gen, n)
        K, C = pair_from_coupling(u, v)
        w = stacked_vector(u, v)
        assert np.abs(noise_matrix(K, C) - np.outer(w, w.conj())).max() < 1e-10


# --- decomposition ----------------------------------------------------------

def test_decompose_damping_pair():
    spec = decompose(-0.5 * np.eye(2), np.eye(2))
    assert spec.noise_dimension == 1
    term = spec.lindblad_terms[0]
    # phase convention puts the coupling exactly on the annihilator
    assert np.allclose(term.b, [1.0]) and np.allclose(term.c, [-1.0j])
    assert np.allclose(term.u, [1.0]) and np.allclose(term.v, [0.0])
    assert np.abs(spec.K_prime).max() < 1e-12
    assert len(spec.hamiltonian_terms) == 0


def test_decompose_rotation_pair():
    omega = 0.8
    J = symplectic_form(1)
    spec = decompose(omega * J, np.zeros((2, 2)))
    assert spec.noise_dimension == 0
    assert np.abs(spec.K_prime - omega * J).max() < 1e-14
    assert len(spec.hamiltonian_terms) == 2
    assert all(abs(t.lam - (-omega)) < 1e-12 for t in spec.hamiltonian_terms)
    # synthesized H equals -omega (a^dag a + 1/2) on the oracle, away from
    # the truncation boundary where aa^dag loses its top entry
    rep = fock.build(1, 12)
    H = fock.hamiltonian_matrix(rep, spec.hamiltonian_terms)
    N = rep.adag[0] @ rep.a[0]
    target = (-omega) * (N + 0.5 * np.eye(12))
    assert np.abs(H[:-1, :-1] - target[:-1, :-1]).max() < 1e-12


def test_decompose_zero_pair():
    spec = decompose(np.zeros((2, 2)), np.zeros((2, 2)))
    assert spec.noise_dimension == 0
    assert len(spec.hamiltonian_terms) == 0
    assert np.abs(spec.K_prime).max() == 0.0


def test_decompose_rejects_inadmissible():
    with pytest.raises(ValueError):
        decompose(np.eye(2), np.zeros((2, 2)))


def test_decompose_rejects_bad_rank_tol():
    with pytest.raises(ValueError):
        decompose(np.zeros((2, 2)), np.zeros((2, 2)), rank_tol=0.0)


def test_reconstruction_identities_random_pairs():
    gen = rng(55)
    for n in (1, 2):
        for _ in range(15):
            pair = random_admissible_pair(gen, n, couplings=int(gen.integers(1, 3)))
            spec = decompose(pair.K, pair.C)
            res = reconstruction_residuals(spec)
            assert res.k_residual < 1e-8
            assert res.c_residual < 1e-8
            assert res.symplectic_residual < 1e-10


def test_decompose_noise_rank():
    gen = rng(56)
    # two generic couplings at n = 2 give a rank-2 noise matrix
    u1, v1 = random_complex(gen, 2), random_complex(gen, 2)
    u2, v2 = random_complex(gen, 2), random_complex(gen, 2)
    K = pair_from_coupling(u1, v1)[0] + pair_from_coupling(u2, v2)[0]
    C = pair_from_coupling(u1, v1)[1] + pair_from_coupling(u2, v2)[1]
    spec = decompose(K, C)
    assert spec.noise_dimension == 2


def test_single_coupling_round_trip_up_to_phase():
    gen = rng(57)
    for _ in range(10):
        u, v = random_complex(gen, 1), random_complex(gen, 1)
        K, C = pair_from_coupling(u, v)
        spec = decompose(K, C)
        assert spec.noise_dimension == 1
        term = spec.lindblad_terms[0]
        # generator equality, not vector equality: the coupling is recovered
        # only up to a global phase
        K2, C2 = pair_from_coupling(term.u, term.v)
        assert np.abs(K2 - K).max() < 1e-10
        assert np.abs(C2 - C).max() < 1e-10
        ratios = stacked_vector(term.u, term.v) / stacked_vector(u, v)
        assert np.abs(np.abs(ratios) - 1.0).max() < 1e-8


# --- Hamiltonian action -----------------------------------------------------

def test_hamiltonian_action_empty():
    res = hamiltonian_action((), np.zeros((2, 2)), [0.4 + 0.2j])
    assert np.abs(res.gain_vector).max() == 0.0
    assert res.scalar_part == 0.0


def test_hamiltonian_action_scalar_is_imaginary():
    gen = rng(58)
    for _ in range(10):
        Kp = random_symplectic_generator(gen, 2)
        z = random_complex(gen, 2)
        res = hamiltonian_action((), Kp, z)
        assert abs(res.scalar_part.real) < 1e-14


def test_hamiltonian_action_equals_generator_of_noiseless_pair():
    gen = rng(59)
    for _ in range(10):
        Kp = random_symplectic_generator(gen, 1)
        pair = QuasifreePair(n=1, K=Kp, C=np.zeros((2, 2)))
        z = random_complex(gen, 1)
        ham = hamiltonian_action((), Kp, z)
        full = generator_action(pair, z)
        assert np.abs(ham.gain_vector - full.gain_vector).max() < 1e-14
        assert abs(ham.scalar_part - full.scalar_part) < 1e-14


def test_hamiltonian_commutator_matches_oracle():
    # matrix elements of -i[H, W(z)] between coherent vectors against the
    # synthesized coefficients, at cutoff 40
    gen = rng(60)
    rep = fock.build(1, 40)
    left = fock.coherent_vector(rep, [0.4 + 0.1j])
    right = fock.coherent_vector(rep, [-0.2 + 0.3j])
    for _ in range(5):
        Kp = random_symplectic_generator(gen, 1)
        spec = decompose(Kp, np.zeros((2, 2)))
        H = fock.hamiltonian_matrix(rep, spec.hamiltonian_terms)
        z = 0.7 * (gen.normal(size=1) + 1j * gen.normal(size=1))
        W = fock.weyl_matrix(rep, z)
        commutator = -1j * (H @ W - W @ H)
        coeff = hamiltonian_action(spec.hamiltonian_terms, spec.K_prime, z)
        gain = fock.creator(rep, coeff.gain_vector) - fock.annihilator(rep, coeff.gain_vector)
        closed = (gain + coeff.scalar_part * np.eye(rep.dim)) @ W
        lhs = np.vdot(left, commutator @ right)
        rhs = np.vdot(left, closed @ right)
        assert abs(lhs - rhs) < 1e-5


# --- reports and serialization ----------------------------------------------

def test_dilation_report_attenuation():
    spec = decompose(-0.5 * np.eye(2), np.eye(2))
    report = dilation_report(spec)
    assert report["noise_dimension"] == 1
    assert len(report["hamiltonian_terms"]) == 0
    assert not report["closed_dynamics"]


def test_dilation_report_rotation():
    spec = decompose(0.5 * symplectic_form(1), np.zeros((2, 2)))
    report = dilation_report(spec)
    assert report["noise_dimension"] == 0
    assert report["closed_dynamics"]
    assert "note" in report


def test_dilation_report_zero():
    report = dilation_report(decompose(np.zeros((2, 2)), np.zeros((2, 2))))
    assert report["noise_dimension"] == 0
    assert report["hamiltonian_terms"] == []


def test_spec_json_round_trip():
    gen = rng(61)
    pair = random_admissible_pair(gen, 2, couplings=2)
    spec = decompose(pair.K, pair.C)
    back = spec_from_dict(spec_to_dict(spec))
    assert back.n == spec.n
    assert back.noise_dimension == spec.noise_dimension
    for t1, t2 in zip(spec.lindblad_terms, back.lindblad_terms):
        assert np.abs(t1.u - t2.u).max() < 1e-15
        assert np.abs(t1.v - t2.v).max() < 1e-15
    for h1, h2 in zip(spec.hamiltonian_terms, back.hamiltonian_terms):
        assert h1.lam == h2.lam
        assert np.abs(h1.w - h2.w).max() < 1e-15
    assert np.array_equal(back.K_prime, spec.K_prime)


def test_lindblad_term_coupling_constructor():
    gen = rng(62)
    u, v = random_complex(gen, 2), random_complex(gen, 2)
    term = LindbladTerm.from_coupling(u, v)
    assert np.abs(term.u - u).max() < 1e-15
    assert np.abs(term.v - v).max() < 1e-15


def test_hamiltonian_term_rejects_zero_strength():
    with pytest.raises(ValueError):
        HamiltonianTerm(lam=0.0, w=[1.0])
