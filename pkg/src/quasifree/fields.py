"""Classical statistics extracted from bosonic fields in distinguished states.

Three constructions are covered, all at finite size:

* Gram factorization of a positive definite kernel over finitely many
  points, together with a permutation group action that leaves the kernel
  invariant (the factor vectors intertwine the action).
* Gaussian field laws of the commuting quadrature families in a coherent
  state: covariance is the Gram matrix of the smearing vectors, means are
  linear functionals of the reference amplitude.
* Compound-Poisson laws of number-like observables in a coherent state:
  the jump measure places mass |<xi_k|u>|^2 at each eigenvalue x_k of the
  generating Hermitian matrix.

Sampling uses an explicitly seeded counter-based generator (Philox) so
every draw is reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symplectic import hermitian_eigh

__all__ = [
    "KernelModel",
    "FieldLaw",
    "LevyLaw",
    "gns_factor",
    "vacuum_field_variance",
    "coherent_gaussian_field",
    "levy_law",
    "sample",
    "kernel_model_from_dict",
]

#: eigenvalues in [-PSD_REPAIR, 0) are clipped to zero before factorization
PSD_REPAIR = 1e-12


@dataclass(frozen=True)
class KernelModel:
    """Positive definite kernel on finitely many points, optionally invariant
    under a list of permutations (each permutation g maps point i to g[i])."""

    points: tuple
    K: np.ndarray
    group: tuple = ()

    def __post_init__(self):
        K = np.asarray(self.K, dtype=complex)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "group", tuple(tuple(g) for g in self.group))
        N = len(self.points)
        if K.shape != (N, N):
            raise ValueError(f"kernel must be {N} x {N}, got {K.shape}")
        scale = 1.0 + np.abs(K).max(initial=0.0)
        if np.abs(K - K.conj().T).max(initial=0.0) > 1e-12 * scale:
            raise ValueError("kernel must be Hermitian")
        w = np.linalg.eigvalsh((K + K.conj().T) / 2.0)
        if w[0] < -1e-9 * scale:
            raise ValueError(f"kernel is not PSD: min eigenvalue {w[0]:.3e}")
        for g in self.group:
            if sorted(g) != list(range(N)):
                raise ValueError(f"not a permutation of 0..{N - 1}: {g}")
            P = np.asarray(g)
            if np.abs(K[np.ix_(P, P)] - K).max() > 1e-12 * scale:
                raise ValueError(f"kernel is not invariant under permutation {g}")


def gns_factor(model: KernelModel) -> np.ndarray:
    """Factor vectors of the kernel: columns lam_j with <lam_i|lam_j> = K_ij.

    Rank-deficient kernels are allowed; the vectors then span a lower
    dimensional subspace.  Eigenvalues below the repair window are rejected.
    """
    w, V = hermitian_eigh((model.K + model.K.conj().T) / 2.0)
    scale = 1.0 + abs(w[0]) if w.size else 1.0
    if w.size and w[-1] < -PSD_REPAIR * scale:
        raise ValueError(f"kernel is not PSD: min eigenvalue {w[-1]:.3e}")
    # zero out machine-noise eigenvalues so rank-deficient kernels factor
    # through a genuinely lower-dimensional span (sqrt would amplify them)
    w = np.where(w > 1e-14 * scale, w, 0.0)
    return np.sqrt(w)[:, None] * V.conj().T


def vacuum_field_variance(z, model: KernelModel) -> float:
    """Vacuum variance (1/2) z^dag K z of the quadrature combination Z.

    Z = sum_j (x_j q(alpha_j) + y_j p(alpha_j)) with z_j = x_j + i y_j; in
    the vacuum Z is centred normal with this variance.
    """
    z = np.asarray(z, dtype=complex).ravel()
    if z.size != len(model.points):
        raise ValueError(f"expected {len(model.points)} coefficients, got {z.size}")
    var = 0.5 * np.vdot(z, model.K @ z)
    if abs(var.imag) > 1e-10 * (1.0 + abs(var.real)):
        raise ValueError("variance came out non-real; kernel is not Hermitian")
    return max(float(var.real), 0.0)


@dataclass(frozen=True)
class FieldLaw:
    """Multivariate normal law (mean, covariance) of a commuting field family."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).ravel()
        cov = np.asarray(self.covariance, dtype=float)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"covariance must be {mean.size} x {mean.size}")
        if np.abs(cov - cov.T).max(initial=0.0) > 1e-10 * (1.0 + np.abs(cov).max(initial=0.0)):
            raise ValueError("covariance must be symmetric")


def coherent_gaussian_field(u0, us, family: str = "p") -> FieldLaw:
    """Gaussian law of the field values at smearing vectors us in the coherent
    state of amplitude u0.

    The vectors must have a real Gram matrix (pairwise real inner products),
    otherwise the family does not commute and has no joint classical law.
    family selects the momentum-type observables ("p", mean 2 Im<u0|u>) or the
    position-type ones ("q", mean 2 Re<u0|u>); the covariance is the Gram
    matrix in both cases.
    """
    u0 = np.asarray(u0, dtype=complex).ravel()
    vecs = [np.asarray(u, dtype=complex).ravel() for u in us]
    if not vecs:
        raise ValueError("need at least one smearing vector")
    for u in vecs:
        if u.size != u0.size:
            raise ValueError("all vectors must share the length of u0")
    gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
    if np.abs(gram.imag).max(initial=0.0) > 1e-10 * (1.0 + np.abs(gram).max(initial=0.0)):
        raise ValueError("smearing vectors have complex inner products; the "
                         "field values do not commute")
    if family == "p":
        mean = np.array([2.0 * np.vdot(u0, u).imag for u in vecs])
    elif family == "q":
        mean = np.array([2.0 * np.vdot(u0, u).real for u in vecs])
    else:
        raise ValueError(f"family must be 'p' or 'q', got {family!r}")
    return FieldLaw(mean=mean, covariance=gram.real)


@dataclass(frozen=True)
class LevyLaw:
    """Compound-Poisson law: independent Poisson(mass_k) counts at atoms x_k."""

    atoms: tuple   # ((x_k, mass_k), ...)

    def __post_init__(self):
        atoms = tuple((float(x), float(m)) for x, m in self.atoms)
        for x, m in atoms:
            if m < 0:
                raise ValueError(f"atom mass must be nonnegative, got {m}")
        object.__setattr__(self, "atoms", atoms)

    def characteristic_function(self, t):
        """exp sum_k (e^{i t x_k} - 1) mass_k, vectorized over t."""
        t = np.asarray(t, dtype=float)
        acc = np.zeros(t.shape, dtype=complex)
        for x, m in self.atoms:
            acc += m * (np.exp(1j * t * x) - 1.0)
        return np.exp(acc)

    @property
    def mean(self) -> float:
        return sum(x * m for x, m in self.atoms)

    @property
    def variance(self) -> float:
        return sum(x * x * m for x, m in self.atoms)


def levy_law(H, u, merge_tol: float = 1e-9) -> LevyLaw:
    """Jump law of the conservation observable built from a Hermitian matrix H
    in the coherent state of amplitude u.

    The atoms sit at the eigenvalues of H with masses |<xi_k|u>|^2; close
    eigenvalues are merged and zero-mass atoms dropped.  u = 0 gives the point
    mass at zero (constant characteristic function).
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("H must be square")
    scale = 1.0 + np.abs(H).max(initial=0.0)
    if np.abs(H - H.conj().T).max(initial=0.0) > 1e-10 * scale:
        raise ValueError("H must be Hermitian")
    u = np.asarray(u, dtype=complex).ravel()
    if u.size != H.shape[0]:
        raise ValueError(f"expected a length-{H.shape[0]} amplitude, got {u.size}")
    w, V = hermitian_eigh((H + H.conj().T) / 2.0)
    masses = np.abs(V.conj().T @ u) ** 2
    atoms = []
    for x, m in zip(w, masses):
        if m <= 1e-15:
            continue
        for idx, (x0, m0) in enumerate(atoms):
            if abs(x - x0) <= merge_tol * scale:
                atoms[idx] = (x0, m0 + m)
                break
        else:
            atoms.append((float(x), float(m)))
    return LevyLaw(atoms=tuple(atoms))


def _rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def sample(law, count: int, seed: int) -> np.ndarray:
    """Draw reproducible samples from a FieldLaw or a LevyLaw.

    Gaussian laws are sampled through an eigenvalue square root of the
    covariance; eigenvalues in [-1e-12, 0) are repaired to zero and anything
    below is rejected.  Jump laws are sampled as sums x_k * Poisson(mass_k)
    over independent counts.  Returns shape (count, dim) for fields and
    (count,) for jump laws.
    """
    if count < 1:
        raise ValueError("need at least one sample")
    rng = _rng(seed)
    if isinstance(law, FieldLaw):
        w, V = np.linalg.eigh((law.covariance + law.covariance.T) / 2.0)
        if w[0] < -PSD_REPAIR:
            raise ValueError(f"covariance is indefinite beyond repair: "
                             f"min eigenvalue {w[0]:.3e}")
        root = V * np.sqrt(np.clip(w, 0.0, None))
        normals = rng.standard_normal((count, law.mean.size))
        return law.mean + normals @ root.T
    if isinstance(law, LevyLaw):
        out = np.zeros(count)
        for x, m in law.atoms:
            if m > 0:
                out += x * rng.poisson(m, size=count)
        return out
    raise TypeError(f"cannot sample from {type(law).__name__}")


def kernel_model_from_dict(data: dict) -> KernelModel:
    """Ingest {"points": [...], "K": [[...]], "group": [[...], ...]}.

    Kernel entries may be plain numbers or [re, im] pairs.
    """
    try:
        points = data["points"]
        raw = data["K"]
    except KeyError as exc:
        raise ValueError(f"kernel JSON is missing field {exc}") from exc
    K = np.array([[complex(e[0], e[1]) if isinstance(e, (list, tuple)) else complex(e)
                   for e in row] for row in raw])
    return KernelModel(points=tuple(points), K=K,
                       group=tuple(tuple(g) for g in data.get("group", [])))
