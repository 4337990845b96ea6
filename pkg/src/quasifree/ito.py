"""Symbolic quantum Ito algebra over the fundamental noise differentials.

A differential is a formal sum of terms  coeff * dL[a, b]  where index 0 is
the time direction and colours 1..d label independent noise channels:

    dL[0, 0] = dt                 time
    dL[0, i]                      annihilation of colour i
    dL[i, 0]                      creation of colour i
    dL[j, i]                      scattering of colour i into colour j

The product of two differentials contracts the superscript of the left
factor against the subscript of the right factor, and the contraction is
zero whenever either index is 0:

    dL[a, b] . dL[g, e] = (b == g != 0) * dL[a, e]

On the coefficient grid this is just a matrix product with the 0 row/column
excluded from the summation.  Coefficients may be scalars or square complex
matrices (system operators); no CAS is involved, only linearity and
contraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ItoDifferential",
    "differential",
    "time_differential",
    "annihilation",
    "creation",
    "scattering",
    "quadrature",
    "poisson_process",
    "ito_product",
    "adjoint",
    "product_differential",
    "ito_equal",
    "quadrature_table",
    "poisson_table",
    "format_differential",
    "format_table",
    "HPCoefficients",
    "hp_coefficients",
    "unitarity_residual",
    "unitarity_check",
    "flow_generator",
]


def _is_zero(coeff) -> bool:
    if isinstance(coeff, np.ndarray):
        return not np.any(coeff)
    return coeff == 0


def _coeff_mul(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
            return a @ b
        return a * b
    return a * b


def _coeff_adjoint(a):
    if isinstance(a, np.ndarray):
        return a.conj().T
    return np.conj(a)


class ItoDifferential:
    """Formal sum of noise differentials with scalar or matrix coefficients.

    terms maps an index pair (a, b) to the coefficient of dL[a, b]; absent
    pairs are zero.  Supports +, -, and scalar multiplication; use
    ito_product for the contraction product.
    """

    __slots__ = ("d", "terms")

    def __init__(self, d: int, terms=None):
        if d < 0:
            raise ValueError("noise dimension must be nonnegative")
        self.d = d
        self.terms = {}
        for key, coeff in (terms or {}).items():
            a, b = key
            if not (0 <= a <= d and 0 <= b <= d):
                raise ValueError(f"index pair {key} out of range for d = {d}")
            if not _is_zero(coeff):
                self.terms[(a, b)] = coeff

    def __add__(self, other):
        if not isinstance(other, ItoDifferential):
            return NotImplemented
        if other.d != self.d:
            raise ValueError(f"noise dimensions differ: {self.d} vs {other.d}")
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            out[key] = out[key] + coeff if key in out else coeff
        return ItoDifferential(self.d, out)

    def __neg__(self):
        return ItoDifferential(self.d, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, ItoDifferential):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        return ItoDifferential(self.d, {k: _coeff_mul(c, scalar)
                                        for k, c in self.terms.items()})

    def __rmul__(self, scalar):
        return ItoDifferential(self.d, {k: _coeff_mul(scalar, c)
                                        for k, c in self.terms.items()})

    def coefficient(self, a: int, b: int):
        return self.terms.get((a, b), 0.0)

    def __repr__(self):
        return f"ItoDifferential(d={self.d}, {format_differential(self)})"


def differential(d: int, a: int, b: int, coeff=1.0) -> ItoDifferential:
    """Single term coeff * dL[a, b]."""
    return ItoDifferential(d, {(a, b): coeff})


def time_differential(d: int) -> ItoDifferential:
    return differential(d, 0, 0)


def annihilation(d: int, i: int) -> ItoDifferential:
    if not 1 <= i <= d:
        raise ValueError(f"colour {i} out of range 1..{d}")
    return differential(d, 0, i)


def creation(d: int, i: int) -> ItoDifferential:
    if not 1 <= i <= d:
        raise ValueError(f"colour {i} out of range 1..{d}")
    return differential(d, i, 0)


def scattering(d: int, i: int, j: int | None = None) -> ItoDifferential:
    """Conservation differential scattering colour i into colour j (default i)."""
    j = i if j is None else j
    if not (1 <= i <= d and 1 <= j <= d):
        raise ValueError(f"colours ({i}, {j}) out of range 1..{d}")
    return differential(d, j, i)


def quadrature(d: int, i: int) -> ItoDifferential:
    """dQ_i = annihilation + creation of colour i; vacuum Brownian motion."""
    return annihilation(d, i) + creation(d, i)


def poisson_process(d: int, i: int, intensity: float) -> ItoDifferential:
    """dN_i = sqrt(intensity) dQ_i + scattering(i, i) + intensity dt."""
    if intensity <= 0:
        raise ValueError("intensity must be positive")
    root = np.sqrt(intensity)
    return (root * quadrature(d, i)) + scattering(d, i) + (intensity * time_differential(d))


def ito_product(X: ItoDifferential, Y: ItoDifferential) -> ItoDifferential:
    """Contraction product of two differentials (coefficients multiply left-to-right)."""
    if not isinstance(X, ItoDifferential) or not isinstance(Y, ItoDifferential):
        raise TypeError("ito_product expects two ItoDifferentials")
    if X.d != Y.d:
        raise ValueError(f"noise dimensions differ: {X.d} vs {Y.d}")
    out = {}
    for (a, b), E in X.terms.items():
        if b == 0:
            continue
        for (g, e), F in Y.terms.items():
            if g != b:
                continue
            key = (a, e)
            prod = _coeff_mul(E, F)
            out[key] = out[key] + prod if key in out else prod
    return ItoDifferential(X.d, out)


def adjoint(X: ItoDifferential) -> ItoDifferential:
    """Formal adjoint: swaps creation and annihilation, conjugates coefficients."""
    return ItoDifferential(X.d, {(b, a): _coeff_adjoint(c)
                                 for (a, b), c in X.terms.items()})


def product_differential(X0, dX: ItoDifferential, Y0, dY: ItoDifferential) -> ItoDifferential:
    """d(XY) for adapted processes with constant values X0, Y0 at the left endpoint.

    Expands to X0 dY + (dX) Y0 + dX dY, the Ito-corrected Leibniz rule.
    """
    left = ItoDifferential(dY.d, {k: _coeff_mul(X0, c) for k, c in dY.terms.items()})
    right = ItoDifferential(dX.d, {k: _coeff_mul(c, Y0) for k, c in dX.terms.items()})
    return left + right + ito_product(dX, dY)


def ito_equal(X: ItoDifferential, Y: ItoDifferential, tol: float = 1e-12) -> bool:
    """Coefficient-wise equality within tol."""
    if X.d != Y.d:
        return False
    for key in set(X.terms) | set(Y.terms):
        diff = X.coefficient(*key) - Y.coefficient(*key)
        err = np.abs(diff).max() if isinstance(diff, np.ndarray) else abs(diff)
        if err > tol:
            return False
    return True


def _zero(d):
    return ItoDifferential(d, {})


def format_differential(X: ItoDifferential, symbols=None) -> str:
    """Render a differential as text, e.g. 'dt + 2.0 dL[0,1]'."""
    if not X.terms:
        return "0"
    names = {(0, 0): "dt"}
    if symbols:
        names.update(symbols)
    parts = []
    for key in sorted(X.terms):
        name = names.get(key, f"dL[{key[0]},{key[1]}]")
        coeff = X.terms[key]
        if isinstance(coeff, np.ndarray):
            parts.append(f"<matrix> {name}")
        elif coeff == 1:
            parts.append(name)
        else:
            coeff = complex(coeff)
            if coeff.imag == 0:
                parts.append(f"{coeff.real:g} {name}")
            else:
                parts.append(f"({coeff:g}) {name}")
    return " + ".join(parts)


def format_table(labels, entries) -> str:
    """Text grid with row/column labels; rows are left factors."""
    cells = [[""] + list(labels)]
    for label, row in zip(labels, entries):
        cells.append([label] + list(row))
    widths = [max(len(r[k]) for r in cells) for k in range(len(cells[0]))]
    lines = []
    for idx, row in enumerate(cells):
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
        if idx == 0:
            lines.append("-" * len(lines[0]))
    return "\n".join(lines)


@dataclass(frozen=True)
class TableCheck:
    ok: bool
    labels: tuple
    entries: tuple   # tuple of tuples of ItoDifferential
    text: str


def _render_entry(entry, candidates, tol=1e-12):
    for name, target in candidates:
        if ito_equal(entry, target, tol):
            return name
    return format_differential(entry)


def quadrature_table(d: int, tol: float = 1e-12) -> TableCheck:
    """Verify dQ_i dQ_j = delta_ij dt and render the classical Brownian table.

    The grid includes the dt row and column, which vanish identically, so the
    text reproduces the full multiplication table of Brownian differentials.
    """
    if d < 1:
        raise ValueError("need at least one colour")
    dt = time_differential(d)
    basis = [(f"dB{i}", quadrature(d, i)) for i in range(1, d + 1)] + [("dt", dt)]
    candidates = [("dt", dt), ("0", _zero(d))]
    ok = True
    entries = []
    rendered = []
    for i, (_, left) in enumerate(basis):
        row = []
        text_row = []
        for j, (_, right) in enumerate(basis):
            prod = ito_product(left, right)
            quad = i < d and j < d
            expected = dt if (quad and i == j) else _zero(d)
            ok = ok and ito_equal(prod, expected, tol)
            row.append(prod)
            text_row.append(_render_entry(prod, candidates, tol))
        entries.append(tuple(row))
        rendered.append(text_row)
    labels = tuple(name for name, _ in basis)
    return TableCheck(ok=ok, labels=labels, entries=tuple(entries),
                      text=format_table(labels, rendered))


def poisson_table(i: int, j: int, intensity_i: float, intensity_j: float,
                  tol: float = 1e-12) -> TableCheck:
    """Verify dN_i dN_j = delta_ij dN_j and render the Poisson/time table.

    The compound processes N are expanded into fundamental differentials, so
    the check exercises the full contraction rule rather than a lookup.
    """
    d = max(i, j)
    dNi = poisson_process(d, i, intensity_i)
    dNj = poisson_process(d, j, intensity_j)
    dt = time_differential(d)
    labels = (f"dN{i}", f"dN{j}", "dt") if i != j else (f"dN{i}", "dt")
    basis = [dNi, dNj, dt] if i != j else [dNi, dt]
    candidates = [(f"dN{i}", dNi), (f"dN{j}", dNj), ("dt", dt), ("0", _zero(d))]
    ok = True
    entries = []
    rendered = []
    for a, left in enumerate(basis):
        row = []
        text_row = []
        for b, right in enumerate(basis):
            prod = ito_product(left, right)
            if labels[a].startswith("dN") and labels[b].startswith("dN"):
                expected = right if labels[a] == labels[b] else _zero(d)
            else:
                expected = _zero(d)
            ok = ok and ito_equal(prod, expected, tol)
            row.append(prod)
            text_row.append(_render_entry(prod, candidates, tol))
        entries.append(tuple(row))
        rendered.append(text_row)
    return TableCheck(ok=ok, labels=labels, entries=tuple(entries),
                      text=format_table(labels, rendered))


@dataclass(frozen=True)
class HPCoefficients:
    """Coefficient grid of an exponential noise equation dU = (L[a][b] dL[a,b]) U.

    blocks[a][b] is the system operator multiplying dL[a, b]; a is the
    superscript of the coefficient, i.e. the subscript of the differential it
    multiplies.
    """

    d: int
    dim: int
    blocks: tuple   # (d+1) x (d+1) nested tuples of complex matrices

    def block(self, a: int, b: int) -> np.ndarray:
        return self.blocks[a][b]


def hp_coefficients(S, L, H, tol: float = 1e-10) -> HPCoefficients:
    """Coefficient grid of a unitary noise equation from standard data (S, L, H).

    S is a unitary matrix on system (x) C^d given as a (d*dim) x (d*dim)
    array of dim x dim blocks S[i][j] (colour-major), L a list of d system
    operators and H a Hermitian system operator.  The grid is

        block[i][j] = S[i][j] - delta_ij I
        block[i][0] = L_i
        block[0][j] = - sum_k L_k^dag S[k][j]
        block[0][0] = -(iH + (1/2) sum_k L_k^dag L_k)

    which satisfies both unitarity conditions by construction.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("H must be a square matrix")
    dim = H.shape[0]
    if np.abs(H - H.conj().T).max(initial=0.0) > tol * (1.0 + np.abs(H).max(initial=0.0)):
        raise ValueError("H must be Hermitian")
    L = [np.asarray(Lk, dtype=complex) for Lk in L]
    d = len(L)
    for Lk in L:
        if Lk.shape != (dim, dim):
            raise ValueError("each coupling operator must match the system dimension")
    S = np.asarray(S, dtype=complex)
    if d == 0:
        if S.size and S.shape != (0, 0):
            raise ValueError("S must be empty when there are no noise channels")
        Sblk = []
    else:
        if S.shape != (d * dim, d * dim):
            raise ValueError(f"S must be {d * dim} x {d * dim}, got {S.shape}")
        if np.abs(S @ S.conj().T - np.eye(d * dim)).max() > tol:
            raise ValueError("S must be unitary")
        Sblk = [[S[a * dim:(a + 1) * dim, b * dim:(b + 1) * dim] for b in range(d)]
                for a in range(d)]

    eye = np.eye(dim, dtype=complex)
    grid = [[None] * (d + 1) for _ in range(d + 1)]
    grid[0][0] = -(1j * H + 0.5 * sum((Lk.conj().T @ Lk for Lk in L), np.zeros_like(eye)))
    for i in range(1, d + 1):
        grid[i][0] = L[i - 1]
        for j in range(1, d + 1):
            grid[i][j] = Sblk[i - 1][j - 1] - (eye if i == j else 0.0)
    for j in range(1, d + 1):
        grid[0][j] = -sum((L[k].conj().T @ Sblk[k][j - 1] for k in range(d)),
                          np.zeros_like(eye))
    return HPCoefficients(d=d, dim=dim,
                          blocks=tuple(tuple(row) for row in grid))


def unitarity_residual(coeffs: HPCoefficients) -> float:
    """Largest violation of the two isometry conditions over all index pairs."""
    d, dim = coeffs.d, coeffs.dim
    worst = 0.0
    for a in range(d + 1):
        for b in range(d + 1):
            Lab = coeffs.block(a, b)
            Lba_dag = coeffs.block(b, a).conj().T
            first = Lab + Lba_dag
            second = Lab + Lba_dag
            for i in range(1, d + 1):
                first = first + coeffs.block(i, a).conj().T @ coeffs.block(i, b)
                second = second + coeffs.block(a, i) @ coeffs.block(b, i).conj().T
            worst = max(worst, np.abs(first).max(initial=0.0),
                        np.abs(second).max(initial=0.0))
    return float(worst)


def unitarity_check(coeffs: HPCoefficients, tol: float = 1e-12) -> bool:
    """Whether the coefficient grid generates a unitary adapted evolution."""
    return unitarity_residual(coeffs) <= tol


def flow_generator(S, L, H, X) -> dict:
    """Structure maps of the Heisenberg flow on a system operator X.

    Returns the map (a, b) -> theta[a][b](X) with

        theta[a][b](X) = X G[a][b] + G[b][a]^dag X + sum_k G[k][a]^dag X G[k][b]

    where G is the coefficient grid of the unitary noise equation.  Entry
    (a, b) is the coefficient of dL[a, b] in the differential of U^dag X U,
    obtained by the contraction product from dU^dag XU + U^dag X dU + dU^dag X dU.
    The (0, 0) entry is the familiar completely positive generator
    i[H, X] - (1/2) sum_k (L_k^dag L_k X + X L_k^dag L_k - 2 L_k^dag X L_k).
    """
    coeffs = hp_coefficients(S, L, H)
    X = np.asarray(X, dtype=complex)
    if X.shape != (coeffs.dim, coeffs.dim):
        raise ValueError(f"X must be {coeffs.dim} x {coeffs.dim}, got {X.shape}")
    d = coeffs.d
    theta = {}
    for a in range(d + 1):
        for b in range(d + 1):
            acc = X @ coeffs.block(a, b) + coeffs.block(b, a).conj().T @ X
            for k in range(1, d + 1):
                acc = acc + coeffs.block(k, a).conj().T @ X @ coeffs.block(k, b)
            theta[(a, b)] = acc
    return theta
