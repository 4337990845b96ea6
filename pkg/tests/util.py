"""Shared random draws for the test suite (all explicitly seeded)."""

import numpy as np

from quasifree.semigroup import QuasifreePair
from quasifree.symplectic import symplectic_form
from quasifree.synthesis import pair_from_coupling


def rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def random_complex(gen, n, scale=1.0):
    vec = gen.normal(size=n) + 1j * gen.normal(size=n)
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec *= scale * gen.uniform(0.3, 1.0) / norm
    return vec


def random_coupling(gen, n, scale=0.7):
    return random_complex(gen, n, scale), random_complex(gen, n, scale)


def random_symplectic_generator(gen, n, scale=1.0):
    """Element of sp(2n): J times a symmetric matrix, spectral norm <= scale."""
    sym = gen.normal(size=(2 * n, 2 * n))
    sym = (sym + sym.T) / 2.0
    K = symplectic_form(n) @ sym
    norm = np.linalg.norm(K, 2)
    if norm > 0:
        K *= scale * gen.uniform(0.3, 1.0) / norm
    return K


def random_admissible_pair(gen, n, couplings=1, coupling_scale=0.7, symp_scale=1.0):
    """Sum of rank-one coupling pairs plus a symplectic residual drift."""
    K = random_symplectic_generator(gen, n, symp_scale)
    C = np.zeros((2 * n, 2 * n))
    for _ in range(couplings):
        u, v = random_coupling(gen, n, coupling_scale)
        K_uv, C_uv = pair_from_coupling(u, v)
        K = K + K_uv
        C = C + C_uv
    return QuasifreePair(n=n, K=K, C=C)


def random_valid_state(gen, n, mean_scale=1.0, extra_scale=0.5):
    """Gaussian state data: covariance I/2 plus a PSD bump is always valid."""
    from quasifree.gaussian import GaussianState

    G = gen.normal(size=(2 * n, 2 * n)) * extra_scale
    S = 0.5 * np.eye(2 * n) + G @ G.T / (2 * n)
    return GaussianState(n=n, l=gen.normal(size=n) * mean_scale,
                         m=gen.normal(size=n) * mean_scale, S=S)


def random_unitary(gen, dim):
    z = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    Q, R = np.linalg.qr(z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))
