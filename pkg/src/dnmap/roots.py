"""Spectral root functions z_i(xi) of omega(z) = omega(xi) and branch tracking.

For a dispersion polynomial of degree n, dividing omega(z) - omega(xi) by
(z - xi) leaves a degree n-1 quotient whose roots are the nontrivial
spectral functions z_i(xi).  Exactly N of them lie in the open lower half
plane for xi deep inside an upper sector, and those branches (continued
inward along a contour) are what the boundary-value formulas consume.

Roots are computed numerically (companion eigenvalues plus a Newton
polish) and labeled by nearest-match against the monomial asymptotes
rho^{i+n-N-k} xi; identities along a contour are maintained by
minimal-total-distance matching between consecutive samples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError, GeometryError, NumericalError, RefinementError
from .geometry import SectorDecomposition, sector_decomposition
from .model import DispersionPolynomial

__all__ = [
    "QuotientPolynomial",
    "RootBranchSet",
    "quotient_polynomial",
    "solve_roots",
    "solve_roots_many",
    "select_lower_branches",
    "track_branches",
    "continue_branches",
    "seeding_radius",
    "branch_collision_points",
    "omega_level_set",
]

_RESIDUAL_TOL = 1e-10
_LEVEL_TOL = 1e-9
_AMBIGUITY_TOL = 1e-12


@dataclass(frozen=True)
class QuotientPolynomial:
    """Quotient (omega(z) - omega(xi)) / (z - xi) at a fixed base point.

    Coefficients are ascending in z and come from synthetic division, so
    the leading coefficient equals the dispersion's leading coefficient
    and evaluating at z = xi reproduces omega'(xi).
    """

    base_point: complex
    coeffs: tuple[complex, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z: complex | np.ndarray) -> complex | np.ndarray:
        acc = np.zeros_like(np.asarray(z, dtype=complex))
        for c in reversed(self.coeffs):
            acc = acc * z + c
        if np.isscalar(z) or np.asarray(z).ndim == 0:
            return complex(acc)
        return acc


def quotient_polynomial(d: DispersionPolynomial, xi: complex) -> QuotientPolynomial:
    """Synthetic division of omega(z) - omega(xi) by (z - xi)."""
    xi = complex(xi)
    coeffs = _quotient_coeffs_many(d, np.array([xi]))[0]
    q = QuotientPolynomial(base_point=xi, coeffs=tuple(coeffs))
    value = q(xi)
    target = d.omega_prime(xi)
    if abs(value - target) > 1e-10 * (1.0 + abs(target)):
        raise NumericalError(
            f"quotient polynomial fails the L'Hopital consistency check at xi={xi!r}"
        )
    return q


def _quotient_coeffs_many(d: DispersionPolynomial, xis: np.ndarray) -> np.ndarray:
    """Ascending quotient coefficients, one row per base point."""
    n = d.degree
    a = np.asarray(d.coeffs, dtype=complex)
    w = d.omega(xis)
    # Descending coefficients of omega(z) - omega(xi): (a_n, ..., a_1, a_0 - w).
    m = xis.size
    desc = np.empty((m, n + 1), dtype=complex)
    desc[:] = a[::-1]
    desc[:, -1] = a[0] - w
    b = np.empty((m, n), dtype=complex)
    b[:, 0] = desc[:, 0]
    for i in range(1, n):
        b[:, i] = desc[:, i] + xis * b[:, i - 1]
    return b[:, ::-1].copy()  # ascending


def solve_roots(q: QuotientPolynomial) -> np.ndarray:
    """All n-1 roots of the quotient polynomial, Newton-polished.

    The residual |poly(root)| is at most 1e-10 times the coefficient scale;
    the root multiset is invariant under scaling the polynomial by any
    modulus-one constant because the companion matrix is built monic.
    """
    if q.degree < 1:
        raise ConstraintError("quotient polynomial must have degree >= 1")
    lead = q.coeffs[-1]
    if lead == 0 or not np.isfinite(abs(lead)):
        raise ConstraintError("quotient polynomial has a degenerate leading coefficient")
    coeffs = np.asarray(q.coeffs, dtype=complex)[None, :]
    return _solve_coeff_rows(coeffs)[0]


def solve_roots_many(d: DispersionPolynomial, xis: np.ndarray) -> np.ndarray:
    """Quotient roots for a batch of base points, shape (len(xis), n-1)."""
    xis = np.asarray(xis, dtype=complex).ravel()
    coeffs = _quotient_coeffs_many(d, xis)
    return _solve_coeff_rows(coeffs)


def _solve_coeff_rows(coeffs: np.ndarray) -> np.ndarray:
    """Roots of a stack of polynomials given by ascending coefficient rows."""
    m, width = coeffs.shape
    deg = width - 1
    monic = coeffs / coeffs[:, -1:]
    if deg == 1:
        roots = -monic[:, :1].astype(complex)
    else:
        comp = np.zeros((m, deg, deg), dtype=complex)
        idx = np.arange(deg - 1)
        comp[:, idx + 1, idx] = 1.0
        comp[:, :, -1] = -monic[:, :-1]
        roots = np.linalg.eigvals(comp)
    # Newton polish against the original (non-monic) rows.
    for _ in range(4):
        p = np.zeros_like(roots)
        dp = np.zeros_like(roots)
        for j in range(deg, -1, -1):
            dp = dp * roots + p
            p = p * roots + coeffs[:, j][:, None]
        safe = np.abs(dp) > 1e-300
        step = np.where(safe, p / np.where(safe, dp, 1.0), 0.0)
        cap = 0.5 * (1.0 + np.abs(roots))
        mag = np.abs(step)
        step = np.where(mag > cap, step * (cap / np.where(mag > 0, mag, 1.0)), step)
        roots = roots - step
    p = np.zeros_like(roots)
    for j in range(deg, -1, -1):
        p = p * roots + coeffs[:, j][:, None]
    scale = np.max(np.abs(coeffs), axis=1)[:, None] * np.maximum(1.0, np.abs(roots)) ** deg
    bad = np.abs(p) > _RESIDUAL_TOL * scale
    if np.any(bad):
        worst = float(np.max(np.abs(p) / scale))
        raise NumericalError(
            f"quotient root residual {worst:.2e} exceeds {_RESIDUAL_TOL:.0e} after polish"
        )
    return roots


def asymptotic_labels(decomposition: SectorDecomposition, k: int) -> tuple[int, ...]:
    """Rotation exponents m with z_i^k(xi) ~ rho^m xi, for i = 1..N."""
    n, N = decomposition.n, decomposition.N
    if not 1 <= k <= n - N:
        raise GeometryError(f"sector index k={k} outside 1..{n - N}")
    return tuple((i + n - N - k) % decomposition.n for i in range(1, N + 1))


def select_lower_branches(
    roots: np.ndarray,
    xi: complex,
    k: int,
    decomposition: SectorDecomposition,
) -> np.ndarray:
    """Pick and label the N lower-half-plane roots at an asymptotic point.

    Labels are assigned by minimal-cost matching of the Im < 0 roots against
    the monomial asymptotes rho^{i+n-N-k} xi (i = 1..N); the result is
    ordered by i.  Raises GeometryError when the strict lower-half count
    differs from N, which signals that |xi| is below the asymptotic regime.
    """
    from scipy.optimize import linear_sum_assignment

    roots = np.asarray(roots, dtype=complex).ravel()
    N = decomposition.N
    lower = roots[roots.imag < 0.0]
    if lower.size != N:
        raise GeometryError(
            f"expected {N} roots below the real axis at xi={xi!r}, found {lower.size}; "
            "the seeding radius is too small"
        )
    rho = np.exp(2j * np.pi / decomposition.n)
    targets = np.array([rho**m * xi for m in asymptotic_labels(decomposition, k)])
    cost = np.abs(lower[None, :] - targets[:, None])
    rows, cols = linear_sum_assignment(cost)
    ordered = np.empty(N, dtype=complex)
    ordered[rows] = lower[cols]
    return ordered


@dataclass(frozen=True)
class RootBranchSet:
    """Branch values z_1^k..z_N^k sampled continuously along a contour."""

    k: int
    samples: np.ndarray
    branches: np.ndarray
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.branches.shape != (self.samples.size, len(self.labels)):
            raise ConstraintError("branch array shape does not match samples and labels")

    @property
    def N(self) -> int:
        return len(self.labels)


def track_branches(
    d: DispersionPolynomial,
    contour: np.ndarray,
    k: int,
    decomposition: SectorDecomposition | None = None,
) -> RootBranchSet:
    """Continue the N tracked branches along a sampled contour.

    Seeds with select_lower_branches at the largest-|xi| sample and walks
    outward in both directions, assigning roots at each sample by the
    minimal-total-distance pairing with the previous sample.  Two pairings
    with materially different values but costs within 1e-12 of each other,
    or an assignment without a clear distance margin over the alternatives,
    raise RefinementError (denser sampling, or a detour around a branch
    collision, is required).
    """
    if decomposition is None:
        decomposition = sector_decomposition(d)
    contour = np.asarray(contour, dtype=complex).ravel()
    if contour.size < 1:
        raise ConstraintError("contour must contain at least one sample")
    all_roots = solve_roots_many(d, contour)
    seed_idx = int(np.argmax(np.abs(contour)))
    seed = select_lower_branches(all_roots[seed_idx], contour[seed_idx], k, decomposition)
    N = decomposition.N
    branches = np.empty((contour.size, N), dtype=complex)
    branches[seed_idx] = seed
    for order in (range(seed_idx + 1, contour.size), range(seed_idx - 1, -1, -1)):
        prev = seed
        for idx in order:
            prev = _match_step(prev, all_roots[idx], contour[idx])
            branches[idx] = prev
    level = d.omega(contour)[:, None]
    mismatch = np.abs(d.omega(branches) - level) / (1.0 + np.abs(level))
    if np.any(mismatch > _LEVEL_TOL):
        raise NumericalError(
            f"tracked branches violate the level-set invariant "
            f"(worst relative error {float(mismatch.max()):.2e})"
        )
    return RootBranchSet(
        k=k,
        samples=contour,
        branches=branches,
        labels=asymptotic_labels(decomposition, k),
    )


def continue_branches(
    d: DispersionPolynomial,
    contour: np.ndarray,
    initial: np.ndarray,
    k: int,
    labels: tuple[int, ...],
    decomposition: SectorDecomposition | None = None,
) -> RootBranchSet:
    """Continue known branch values along a contour starting at its first sample.

    Unlike track_branches, which self-seeds at the largest-|xi| sample using
    the asymptotic ordering, this takes the branch values at contour[0] as
    given (typically the endpoint of a previously tracked leg) and walks
    forward only.  The initial values are snapped to the exact roots at
    contour[0] first; a mismatch larger than the pairing tolerances raises
    RefinementError just as an ambiguous interior step would.
    """
    if decomposition is None:
        decomposition = sector_decomposition(d)
    contour = np.asarray(contour, dtype=complex).ravel()
    if contour.size < 1:
        raise ConstraintError("contour must contain at least one sample")
    initial = np.asarray(initial, dtype=complex).ravel()
    if initial.size != len(labels):
        raise ConstraintError("initial branch values do not match the label count")
    all_roots = solve_roots_many(d, contour)
    branches = np.empty((contour.size, initial.size), dtype=complex)
    prev = _match_step(initial, all_roots[0], contour[0])
    branches[0] = prev
    for idx in range(1, contour.size):
        prev = _match_step(prev, all_roots[idx], contour[idx])
        branches[idx] = prev
    level = d.omega(contour)[:, None]
    mismatch = np.abs(d.omega(branches) - level) / (1.0 + np.abs(level))
    if np.any(mismatch > _LEVEL_TOL):
        raise NumericalError(
            f"continued branches violate the level-set invariant "
            f"(worst relative error {float(mismatch.max()):.2e})"
        )
    return RootBranchSet(k=k, samples=contour, branches=branches, labels=tuple(labels))


def _match_step(prev: np.ndarray, roots: np.ndarray, xi: complex) -> np.ndarray:
    """One continuation step: best ordered selection of |prev| roots."""
    N = prev.size
    scale = 1.0 + abs(xi)
    best_cost = np.inf
    second_cost = np.inf
    best: tuple[int, ...] | None = None
    second: tuple[int, ...] | None = None
    for perm in itertools.permutations(range(roots.size), N):
        cost = float(np.sum(np.abs(prev - roots[list(perm)])))
        if cost < best_cost:
            second_cost, second = best_cost, best
            best_cost, best = cost, perm
        elif cost < second_cost:
            second_cost, second = cost, perm
    assert best is not None
    chosen = roots[list(best)]
    if second is not None and second_cost - best_cost <= _AMBIGUITY_TOL * (1.0 + best_cost):
        alt = roots[list(second)]
        if np.max(np.abs(np.sort_complex(chosen) - np.sort_complex(alt))) > 1e-9 * scale:
            raise RefinementError(
                f"ambiguous branch pairing at xi={xi!r}; sample the contour more densely "
                "or detour around the branch collision",
                suggested_factor=4,
            )
    for j in range(N):
        d1 = abs(prev[j] - chosen[j])
        if d1 <= 1e-9 * scale:
            continue
        others = roots[np.abs(roots - chosen[j]) > 1e-9 * scale]
        if others.size == 0:
            continue
        d2 = float(np.min(np.abs(prev[j] - others)))
        if d1 > 0.45 * d2:
            raise RefinementError(
                f"branch identity uncertain at xi={xi!r} (moved {d1:.3e} vs. nearest "
                f"alternative {d2:.3e}); sample the contour more densely",
                suggested_factor=4,
            )
    return chosen


def seeding_radius(
    d: DispersionPolynomial,
    decomposition: SectorDecomposition | None = None,
) -> float:
    """Verified asymptotic radius L for branch seeding.

    Starts from L = 10 (1 + sum_{j<n} |a_j|) and checks, at 64 probe angles
    spread over the interiors of the upper sectors on |xi| = L, that the
    quotient roots stay well separated (discriminant bounded away from
    zero) and that exactly N of them lie strictly below the real axis.
    On failure L doubles, at most 6 times.
    """
    if decomposition is None:
        decomposition = sector_decomposition(d)
    n, N = decomposition.n, decomposition.N
    L = 10.0 * (1.0 + float(sum(abs(c) for c in d.coeffs[:-1])))
    per = max(2, int(np.ceil(64 / (n - N))))
    for _ in range(7):
        ok = True
        sep_floor = 0.25 * L * np.sin(np.pi / n)
        for t1, t2 in decomposition.upper:
            angles = t1 + (t2 - t1) * (np.arange(1, per + 1)) / (per + 1)
            probes = L * np.exp(1j * angles)
            roots = solve_roots_many(d, probes)
            for row in roots:
                if int(np.sum(row.imag < 0.0)) != N:
                    ok = False
                    break
                if row.size > 1:
                    diffs = np.abs(row[:, None] - row[None, :])
                    np.fill_diagonal(diffs, np.inf)
                    if float(diffs.min()) < sep_floor:
                        ok = False
                        break
            if not ok:
                break
        if ok:
            return L
        L *= 2.0
    raise GeometryError(
        "could not verify an asymptotic seeding radius after 6 doublings"
    )


def omega_level_set(d: DispersionPolynomial, w: complex) -> np.ndarray:
    """All n solutions of omega(z) = w, Newton-polished."""
    a = np.asarray(d.coeffs, dtype=complex).copy()
    a[0] -= w
    return _solve_coeff_rows(a[None, :])[0]


def branch_collision_points(d: DispersionPolynomial) -> tuple[complex, ...]:
    """Base points xi where spectral roots collide (branch points of z_i).

    Two roots of omega(z) = omega(xi) coincide exactly when omega(xi) is a
    critical value of omega, so the collision set is the union of the
    level sets through the critical points of omega.  Points are
    deduplicated and ordered by (|xi|, arg xi).
    """
    n = d.degree
    deriv = np.array([j * d.coeffs[j] for j in range(1, n + 1)], dtype=complex)
    if n == 1:
        return ()
    crit = _solve_coeff_rows(deriv[None, :])[0]
    found: list[complex] = []
    for c in crit:
        for z in omega_level_set(d, complex(d.omega(c))):
            z = complex(z)
            if all(abs(z - p) > 1e-9 * (1.0 + abs(z)) for p in found):
                found.append(z)
    found.sort(key=lambda z: (round(abs(z), 12), np.angle(z)))
    return tuple(found)
