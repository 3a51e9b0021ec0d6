"""Sector geometry of the dispersion relation.

The solution formulas integrate over the part of {Re omega(xi) < 0} in the
upper half plane.  Asymptotically that region is a union of wedges of the
principal domain {Re(a_n xi^n) < 0}; each wedge has angular width pi/n and
the number that lie in the upper half plane is n - N, where N is the number
of unknown boundary derivatives.  This module computes N, the wedge
decomposition, membership tests, and the zeros of omega with their
position relative to the enclosing sectors

    S_k = { (k-1) pi/(n-N) < arg zeta < k pi/(n-N) },   k = 1..n-N,

classified as interior (Theta_k) or on a boundary ray (Pi_k).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError, NumericalError
from .model import DispersionPolynomial, unknown_count

__all__ = [
    "count_unknowns",
    "SectorDecomposition",
    "sector_decomposition",
    "in_domain",
    "in_principal_domain",
    "OmegaZeroSet",
    "zeros_of_omega",
]

_TWO_PI = 2.0 * np.pi
_RAY_TOL = 1e-9  # angular tolerance for "on a boundary ray"
_CLUSTER_TOL = 1e-8


def count_unknowns(n: int, a_n: complex) -> int:
    """Number of unknown boundary derivatives N for degree n, leading a_n."""
    return unknown_count(n, complex(a_n))


@dataclass(frozen=True)
class SectorDecomposition:
    """Wedges of the principal domain {Re(a_n xi^n) < 0}.

    upper/lower hold (theta_1, theta_2) angle pairs with theta_1 in
    [0, 2 pi), theta_2 = theta_1 + pi/n (theta_2 may equal 2 pi exactly).
    Upper wedges are sorted by increasing angle and indexed k = 1..n-N.
    """

    n: int
    phi: float
    N: int
    upper: tuple[tuple[float, float], ...]
    lower: tuple[tuple[float, float], ...]

    @property
    def width(self) -> float:
        return np.pi / self.n

    def upper_rays(self, k: int) -> tuple[float, float]:
        """Out-ray and in-ray angles (theta_k^1, theta_k^2) of upper wedge k (1-based)."""
        return self.upper[k - 1]


def sector_decomposition(d: DispersionPolynomial) -> SectorDecomposition:
    """Decompose the principal domain of a valid dispersion into wedges.

    The wedge edges solve Re(a_n xi^n) = 0:

        theta^1_m = pi/2n - (phi - 2 m pi)/n,  theta^2_m = theta^1_m + pi/n.

    Wedges strictly inside the upper half plane are the integration sectors;
    because |phi| <= pi/2 no wedge straddles the positive or negative real
    axis, so the upper/lower split by midpoint is exact.
    """
    n = d.degree
    N = count_unknowns(n, d.leading)
    phi = d.phi
    width = np.pi / n
    upper: list[tuple[float, float]] = []
    lower: list[tuple[float, float]] = []
    for m in range(n):
        t1 = np.pi / (2 * n) - (phi - 2 * m * np.pi) / n
        t1 = float(t1 % _TWO_PI)
        if t1 >= _TWO_PI - 1e-15:
            t1 = 0.0
        t2 = t1 + width
        mid = t1 + 0.5 * width
        if np.sin(mid) > 0:
            upper.append((t1, t2))
        else:
            lower.append((t1, t2))
    upper.sort()
    lower.sort()
    if len(upper) != n - N:
        raise NumericalError(
            f"expected {n - N} upper wedges, found {len(upper)}: {upper!r}"
        )
    return SectorDecomposition(n=n, phi=phi, N=N, upper=tuple(upper), lower=tuple(lower))


def in_principal_domain(d: DispersionPolynomial, xi) -> bool | np.ndarray:
    """Strict membership test Re(a_n xi^n) < 0 (scalar or elementwise)."""
    xi = np.asarray(xi, dtype=complex)
    val = (d.leading * xi**d.degree).real < 0
    return val if val.ndim else bool(val)


def in_domain(d: DispersionPolynomial, xi) -> bool | np.ndarray:
    """Strict membership test Re omega(xi) < 0 (scalar or elementwise)."""
    xi = np.asarray(xi, dtype=complex)
    val = np.asarray(d.omega(xi)).real < 0
    return val if val.ndim else bool(val)


@dataclass(frozen=True)
class OmegaZeroSet:
    """Zeros of omega with multiplicities and sector classification.

    zeros holds the nonzero roots (cluster representatives when roots fall
    within 1e-8 of each other; `clustered` flags that case).  interior[k]
    and boundary[k] list indices into zeros, for the enclosing sector S_k.
    The origin is reported separately via origin_multiplicity.
    """

    zeros: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    origin_multiplicity: int
    interior: dict[int, tuple[int, ...]]
    boundary: dict[int, tuple[int, ...]]
    n_sectors: int
    clustered: bool

    @property
    def zero_at_origin(self) -> bool:
        return self.origin_multiplicity > 0

    @property
    def total_multiplicity(self) -> int:
        return self.origin_multiplicity + sum(self.multiplicities)

    def max_radius(self) -> float:
        return max((abs(z) for z in self.zeros), default=0.0)


def zeros_of_omega(d: DispersionPolynomial) -> OmegaZeroSet:
    """Locate and classify all zeros of omega.

    The origin multiplicity is read off exactly from vanishing trailing
    coefficients; the remaining roots come from the balanced companion
    matrix (np.roots) followed by at most 5 Newton iterations on the
    deflated polynomial.  Refined roots must satisfy
    |omega(zeta)| <= 1e-10 * max_j |a_j| (relaxed for clustered roots).
    """
    n = d.degree
    n_sectors = n - count_unknowns(n, d.leading)
    coeffs = list(d.coeffs)
    m0 = 0
    while m0 < n and coeffs[m0] == 0:
        m0 += 1
    reduced = coeffs[m0:]  # ascending, constant term nonzero (unless omega == a_n xi^n)

    roots: list[complex] = []
    if len(reduced) > 1:
        raw = np.roots(np.asarray(reduced[::-1], dtype=complex))
        arr = np.asarray(raw, dtype=complex)
        red = np.asarray(reduced, dtype=complex)
        dred = red[1:] * np.arange(1, red.size)
        for _ in range(5):
            pv = np.polyval(red[::-1], arr)
            dv = np.polyval(dred[::-1], arr)
            safe = np.abs(dv) > 1e-300
            step = np.where(safe, pv / np.where(safe, dv, 1.0), 0.0)
            arr = arr - step
        scale = max(abs(c) for c in d.coeffs)
        resid = np.abs(np.asarray(d.omega(arr)))
        roots = [complex(z) for z in arr]
        residuals = [float(r) for r in resid]
    else:
        residuals = []

    # cluster roots closer than the tolerance and accumulate multiplicity
    reps: list[complex] = []
    mults: list[int] = []
    clustered = False
    for z in sorted(roots, key=lambda w: (round(w.real, 12), round(w.imag, 12))):
        for idx, r in enumerate(reps):
            if abs(z - r) < _CLUSTER_TOL:
                reps[idx] = (r * mults[idx] + z) / (mults[idx] + 1)
                mults[idx] += 1
                clustered = True
                break
        else:
            reps.append(z)
            mults.append(1)

    if roots and not clustered:
        scale = max(abs(c) for c in d.coeffs)
        worst = max(residuals)
        if worst > 1e-10 * scale:
            raise NumericalError(
                f"zero refinement stalled: |omega(zeta)| = {worst:.3e} "
                f"exceeds 1e-10 * {scale:.3e}"
            )

    interior: dict[int, list[int]] = {k: [] for k in range(1, n_sectors + 1)}
    boundary: dict[int, list[int]] = {k: [] for k in range(1, n_sectors + 1)}
    sector_width = np.pi / n_sectors
    for idx, z in enumerate(reps):
        theta = float(np.angle(z))
        if theta < -_RAY_TOL:
            continue  # lower half plane: not part of any upper sector
        theta = max(theta, 0.0)
        if theta > np.pi + _RAY_TOL:
            continue
        for k in range(1, n_sectors + 1):
            alpha = (k - 1) * sector_width
            beta = k * sector_width
            if abs(theta - alpha) <= _RAY_TOL or abs(theta - beta) <= _RAY_TOL:
                boundary[k].append(idx)
            elif alpha < theta < beta:
                interior[k].append(idx)

    if m0 + sum(mults) != n:
        raise NumericalError(
            f"zero multiplicities sum to {m0 + sum(mults)}, expected {n}"
        )

    return OmegaZeroSet(
        zeros=tuple(reps),
        multiplicities=tuple(mults),
        origin_multiplicity=m0,
        interior={k: tuple(v) for k, v in interior.items()},
        boundary={k: tuple(v) for k, v in boundary.items()},
        n_sectors=n_sectors,
        clustered=clustered,
    )
