"""Tail polynomials, flux coefficients, and the alternant matrix.

The tail polynomials omega_m collect the top m + 1 coefficients of the
dispersion polynomial,

    omega_m(xi) = sum_{i=0}^{m} a_{n-i} xi^{m-i},

so omega_n = omega and omega_0 = a_n, and they satisfy the division
recursion omega_m(xi) xi = omega_{m+1}(xi) - a_{n-m-1} coefficientwise.
They are evaluated from the closed-form sum, never the recursion, since
the recursion divides by xi and the origin value is needed.

The flux coefficients c_m(xi) = i^{3m+1} omega_{n-m-1}(xi) are the
global-relation weights of the boundary-value transforms.

The alternant matrix of a sector couples the unknown boundary orders
through the spectral root branches: A(k, xi) has entries
omega_{n-v_j-1}(z_i^k(xi)).  Its determinant quotients (principal minors
det A_ji / det A and column replacements det A^{jl} / det A) are the
Cramer coefficients of the boundary map; they are computed by LU solves
rather than explicit minors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError, NumericalError
from .geometry import SectorDecomposition, sector_decomposition
from .model import DispersionPolynomial
from .monomial import vandermonde_quotients, vandermonde_system
from .roots import RootBranchSet, asymptotic_labels

__all__ = [
    "TailPolynomialFamily",
    "tail_polynomial",
    "flux_coefficient",
    "alternant_matrix",
    "AlternantQuotients",
    "alternant_quotients",
    "AlternantSystem",
    "alternant_system",
    "monomial_specialization_check",
]


def _ipow(m: int) -> complex:
    return (1j) ** (m % 4)


@dataclass(frozen=True)
class TailPolynomialFamily:
    """Ascending coefficient rows of omega_0 .. omega_n for one dispersion."""

    dispersion: DispersionPolynomial

    def coefficients(self, m: int) -> np.ndarray:
        """Ascending coefficients of omega_m (length m + 1)."""
        n = self.dispersion.degree
        if not 0 <= m <= n:
            raise ConstraintError(f"tail index m={m} outside 0..{n}")
        return np.asarray(self.dispersion.coeffs[n - m :], dtype=complex)

    def __call__(self, m: int, xi) -> np.ndarray | complex:
        coeffs = self.coefficients(m)
        xi_arr = np.asarray(xi, dtype=complex)
        acc = np.full(xi_arr.shape, coeffs[-1], dtype=complex)
        for c in coeffs[-2::-1]:
            acc = acc * xi_arr + c
        if np.isscalar(xi) or xi_arr.ndim == 0:
            return complex(acc)
        return acc


def tail_polynomial(d: DispersionPolynomial, m: int, xi) -> np.ndarray | complex:
    """omega_m(xi), vectorized over xi."""
    return TailPolynomialFamily(d)(m, xi)


def flux_coefficient(d: DispersionPolynomial, m: int, xi) -> np.ndarray | complex:
    """Global-relation flux coefficient c_m(xi) = i^{3m+1} omega_{n-m-1}(xi)."""
    n = d.degree
    if not 0 <= m <= n - 1:
        raise ConstraintError(f"flux index m={m} outside 0..{n - 1}")
    return _ipow(3 * m + 1) * np.asarray(tail_polynomial(d, n - m - 1, xi))


def alternant_matrix(
    d: DispersionPolynomial, v_orders: tuple[int, ...], roots: np.ndarray
) -> np.ndarray:
    """Alternant matrices for batched root tuples.

    `roots` has shape (..., N); the result has shape (..., N, N) with
    entry (i, j) equal to omega_{n-v_j-1}(roots[..., i]).
    """
    roots = np.asarray(roots, dtype=complex)
    N = roots.shape[-1]
    if len(v_orders) != N:
        raise ConstraintError(
            f"got {len(v_orders)} unknown orders for {N} root branches"
        )
    family = TailPolynomialFamily(d)
    n = d.degree
    out = np.empty(roots.shape + (N,), dtype=complex)
    for j, v in enumerate(v_orders):
        out[..., :, j] = family(n - v - 1, roots)
    return out


@dataclass(frozen=True)
class AlternantQuotients:
    """Determinant quotients of a batch of alternant matrices.

    minor_over_det[..., j-1, i-1] is det A_ji / det A (principal minor,
    row i and column j deleted, no sign); replacement_over_det[..., j-1, l-1]
    is det A^{jl} / det A (column j replaced by the given-order column).
    """

    det: np.ndarray
    minor_over_det: np.ndarray
    replacement_over_det: np.ndarray


def alternant_quotients(
    d: DispersionPolynomial,
    roots: np.ndarray | RootBranchSet,
    v_orders: tuple[int, ...],
    u_orders: tuple[int, ...],
) -> AlternantQuotients:
    """Minor and column-replacement quotients at batched root tuples.

    `roots` is either an array of shape (..., N) or a RootBranchSet
    (whose branch array is used).  Near-singular matrices (sample too
    close to a root collision) raise NumericalError.
    """
    if isinstance(roots, RootBranchSet):
        roots = roots.branches
    roots = np.asarray(roots, dtype=complex)
    A = alternant_matrix(d, v_orders, roots)
    det = np.linalg.det(A)
    row_norms = np.linalg.norm(A, axis=-1)
    scale = np.prod(row_norms, axis=-1)
    if np.any(np.abs(det) < 1e-12 * scale):
        raise NumericalError(
            "alternant matrix is near-singular; sample too close to a root collision"
        )
    N = len(v_orders)
    inv = np.linalg.inv(A)
    signs = (-1.0) ** (np.arange(N)[:, None] + np.arange(N)[None, :])
    # det A_ji / det A = (-1)^{i+j} (A^{-1})_{ji}; index order (j, i).
    minor_over_det = signs * inv
    family = TailPolynomialFamily(d)
    n = d.degree
    B = np.empty(roots.shape + (len(u_orders),), dtype=complex)
    for l, u in enumerate(u_orders):
        B[..., :, l] = family(n - u - 1, roots)
    replacement_over_det = np.linalg.solve(A, B)
    return AlternantQuotients(
        det=det,
        minor_over_det=minor_over_det,
        replacement_over_det=replacement_over_det,
    )


@dataclass(frozen=True)
class AlternantSystem:
    """Alternant data of one sector at a single spectral sample."""

    k: int
    xi: complex
    roots: np.ndarray
    matrix: np.ndarray
    det: complex
    minor_over_det: np.ndarray
    replacement_over_det: np.ndarray


def alternant_system(
    d: DispersionPolynomial,
    k: int,
    xi: complex,
    roots: np.ndarray,
    v_orders: tuple[int, ...],
    u_orders: tuple[int, ...],
) -> AlternantSystem:
    """Single-point AlternantSystem with all quotients materialized."""
    roots = np.asarray(roots, dtype=complex).ravel()
    quotients = alternant_quotients(d, roots, v_orders, u_orders)
    matrix = alternant_matrix(d, v_orders, roots)
    return AlternantSystem(
        k=k,
        xi=complex(xi),
        roots=roots,
        matrix=matrix,
        det=complex(quotients.det),
        minor_over_det=quotients.minor_over_det,
        replacement_over_det=quotients.replacement_over_det,
    )


def monomial_specialization_check(
    d: DispersionPolynomial,
    k: int,
    xi: complex,
    v_orders: tuple[int, ...] | None = None,
    u_orders: tuple[int, ...] | None = None,
    decomposition: SectorDecomposition | None = None,
) -> float:
    """Max relative deviation between alternant and Vandermonde quotients.

    For monomial dispersion the sector's root branches are exact
    rotations of xi, and the alternant quotients reduce to Vandermonde
    quotients times powers of xi:

        det A_ji / det A   = a_n^{-1} (det V_ji / det V)(rho^{n-N+1-k}) xi^{v_j-n+1}
        det A^{jl} / det A = (det V^{jl} / det V)(rho^{n-N+1-k}) xi^{v_j-u_l}

    Both sides are evaluated independently for every (j, i) and (j, l);
    the default order split is the canonical one (first n - N orders
    given).
    """
    if not d.is_monomial:
        raise ConstraintError("monomial specialization check needs monomial dispersion")
    if decomposition is None:
        decomposition = sector_decomposition(d)
    n, N = decomposition.n, decomposition.N
    if v_orders is None:
        v_orders = tuple(range(n - N, n))
    if u_orders is None:
        u_orders = tuple(o for o in range(n) if o not in v_orders)
    rho = np.exp(2j * np.pi / n)
    labels = asymptotic_labels(decomposition, k)
    roots = rho ** np.asarray(labels) * xi
    quotients = alternant_quotients(d, roots, v_orders, u_orders)
    sys = vandermonde_system(n, N, v_orders, power=n - N + 1 - k)
    deviation = 0.0
    for j0, v in enumerate(v_orders):
        for i0 in range(N):
            lhs = quotients.minor_over_det[j0, i0]
            rhs = (
                vandermonde_quotients(sys, j0 + 1, i=i0 + 1)
                * xi ** (v - n + 1)
                / d.leading
            )
            deviation = max(deviation, abs(lhs - rhs) / (1.0 + abs(rhs)))
        for l0, u in enumerate(u_orders):
            lhs = quotients.replacement_over_det[j0, l0]
            rhs = vandermonde_quotients(sys, j0 + 1, u_order=u) * xi ** (v - u)
            deviation = max(deviation, abs(lhs - rhs) / (1.0 + abs(rhs)))
    return float(deviation)
