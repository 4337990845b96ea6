"""Quasifree completely positive semigroups on n bosonic modes.

A real matrix pair (K, C) with C symmetric PSD and C + i(K^T J + J K) >= 0
generates a one-parameter semigroup that maps the Weyl operator W(z) to a
damped Weyl operator, and dually maps Gaussian states to Gaussian states:

    means:       (l_t, -m_t) = e^{tK^T} (l, -m)
    covariance:  S_t = e^{tK^T} S e^{tK} + (1/2) B_t,
    B_t = integral_0^t e^{sK^T} C e^{sK} ds.

Both directions are implemented and linked by the duality identity
Tr(rho_t W(z)) = Tr(rho W(z_out)) exp(-damping), which the tests exercise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import GaussianState, validate
from .symplectic import expm, gram_integral, psd_check, real_embed, real_extract, symplectic_form

__all__ = [
    "QuasifreePair",
    "WeylActionResult",
    "GeneratorCoefficients",
    "admissible",
    "weyl_action",
    "evolve_state",
    "generator_action",
    "pair_to_dict",
    "pair_from_dict",
]


def admissible(K, C, tol: float = 1e-9):
    """Test the generator inequality C + i(K^T J + J K) >= 0.

    Returns (ok, min_eigenvalue) with the smallest eigenvalue of the noise
    matrix.  C must be symmetric (asymmetric input is rejected).
    """
    K = np.asarray(K, dtype=float)
    C = np.asarray(C, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] % 2 != 0:
        raise ValueError(f"K must be square of even order, got {K.shape}")
    if C.shape != K.shape:
        raise ValueError(f"C must match K, got {C.shape} vs {K.shape}")
    if np.abs(C - C.T).max(initial=0.0) > 1e-10 * (1.0 + np.abs(C).max(initial=0.0)):
        raise ValueError("C must be symmetric")
    n = K.shape[0] // 2
    J = symplectic_form(n)
    D = C + 1j * (K.T @ J + J @ K)
    return psd_check(D, tol)


@dataclass(frozen=True)
class QuasifreePair:
    """Admissible generating pair; the inequality is checked on construction."""

    n: int
    K: np.ndarray
    C: np.ndarray
    min_noise_eigenvalue: float = 0.0

    def __post_init__(self):
        K = np.asarray(self.K, dtype=float)
        C = np.asarray(self.C, dtype=float)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "C", C)
        if K.shape != (2 * self.n, 2 * self.n):
            raise ValueError(f"K must be {2 * self.n} x {2 * self.n}, got {K.shape}")
        ok, min_eig = admissible(K, C)
        if not ok:
            raise ValueError(f"pair is not admissible: noise matrix has "
                             f"min eigenvalue {min_eig:.3e}")
        psd, ceig = psd_check((C + C.T) / 2.0 + 0j)
        if not psd:
            raise ValueError(f"C must be PSD, min eigenvalue {ceig:.3e}")
        object.__setattr__(self, "min_noise_eigenvalue", min_eig)


@dataclass(frozen=True)
class WeylActionResult:
    """Damped Weyl image: T_t(W(z)) = W(z_out) exp(-damping_exponent)."""

    z_out: np.ndarray
    damping_exponent: float


def weyl_action(pair: QuasifreePair, t: float, z) -> WeylActionResult:
    """Image of the Weyl operator under the semigroup at time t >= 0."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    z = np.asarray(z, dtype=complex).ravel()
    if z.size != pair.n:
        raise ValueError(f"expected a length-{pair.n} argument, got {z.size}")
    xi = real_embed(z)
    z_out = real_extract(expm(t * pair.K) @ xi)
    B = gram_integral(pair.K, pair.C, t)
    return WeylActionResult(z_out=z_out, damping_exponent=float(0.5 * xi @ B @ xi))


def evolve_state(state: GaussianState, pair: QuasifreePair, t: float) -> GaussianState:
    """Predual action on Gaussian states; preserves validity for all t >= 0."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    if state.n != pair.n:
        raise ValueError(f"state has {state.n} modes but pair has {pair.n}")
    diag = validate(state)
    if not diag.is_valid:
        raise ValueError(f"invalid input state: min eig {diag.min_eigenvalue:.3e}")
    E = expm(t * pair.K.T)
    w = E @ np.concatenate([state.l, -state.m])
    S_t = E @ state.S @ E.T + 0.5 * gram_integral(pair.K, pair.C, t)
    return GaussianState(n=state.n, l=w[:state.n], m=-w[state.n:],
                         S=(S_t + S_t.T) / 2.0)


@dataclass(frozen=True)
class GeneratorCoefficients:
    """Coefficients g, s of L(W(z)) = {a^dag(g) - a(g) + s} W(z)."""

    gain_vector: np.ndarray
    scalar_part: complex


def generator_action(pair: QuasifreePair, z) -> GeneratorCoefficients:
    """Generator of the semigroup evaluated on the Weyl operator W(z).

    g is the complex form of K applied to the real embedding of z; the scalar
    is (1/2){<g|z> - <z|g> - (Rz)^T C (Rz)}.  The imaginary part of the scalar
    is a phase drift, the (nonpositive) real part the damping rate.
    """
    z = np.asarray(z, dtype=complex).ravel()
    if z.size != pair.n:
        raise ValueError(f"expected a length-{pair.n} argument, got {z.size}")
    xi = real_embed(z)
    g = real_extract(pair.K @ xi)
    inner = np.vdot(g, z)  # <g|z>, antilinear in the first slot
    scalar = 0.5 * (inner - np.conj(inner) - xi @ pair.C @ xi)
    return GeneratorCoefficients(gain_vector=g, scalar_part=complex(scalar))


def pair_to_dict(pair: QuasifreePair) -> dict:
    """JSON form {"n": int, "K": [[...]], "C": [[...]]}."""
    return {"n": pair.n,
            "K": [[float(v) for v in row] for row in pair.K],
            "C": [[float(v) for v in row] for row in pair.C]}


def pair_from_dict(data: dict) -> QuasifreePair:
    try:
        return QuasifreePair(n=int(data["n"]), K=np.asarray(data["K"], dtype=float),
                             C=np.asarray(data["C"], dtype=float))
    except KeyError as exc:
        raise ValueError(f"pair JSON is missing field {exc}") from exc
