"""Problem model for half-line evolution equations.

The PDE is

    q_t(t, x) + omega(-i d/dx) q(t, x) = 0,    x in (0, inf), t in (0, T),

with a polynomial dispersion relation omega(xi) = a_n xi^n + ... + a_0.
Well-posedness requires |a_n| = 1 and, when n is even, Re(a_n) >= 0, or,
when n is odd, a_n = +-i.  A boundary value problem prescribes the initial
data q(0, x), the given boundary derivatives d^{u}q/dx^{u}(t, 0) for u in a
set U of n - N orders, and asks for the remaining derivatives of order v in
V = {0, ..., n-1} \\ U.  N depends only on n and a_n.

This module holds the data types (dispersion, signals, initial data,
problem, result) and their validation.  The maps themselves live in
`monomial` and `general`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConstraintError, DomainError

__all__ = [
    "DispersionPolynomial",
    "Signal",
    "CallableSignal",
    "SampledSignal",
    "InitialData",
    "BoundaryValueProblem",
    "DNMapResult",
    "Violation",
    "validate_problem",
    "validate_dispersion",
    "unknown_count",
    "normalize_leading",
    "signal_value",
    "signal_derivative",
]

_LEADING_TOL = 1e-12
_PARITY_TOL = 1e-12
_COMPAT_TOL = 1e-8


class DispersionPolynomial:
    """Polynomial dispersion relation omega(xi) = sum_j a_j xi^j.

    Coefficients are stored in ascending order (a_0, ..., a_n).  The
    constructor only rejects structurally impossible input (no terms,
    vanishing leading coefficient); admissibility of the leading
    coefficient is reported by `validate` so that invalid problems can be
    described rather than merely refused.
    """

    def __init__(self, coeffs: Sequence[complex]) -> None:
        arr = tuple(complex(c) for c in coeffs)
        if len(arr) < 2:
            raise ConstraintError("dispersion needs at least degree 1 (two coefficients)")
        if arr[-1] == 0:
            raise ConstraintError("leading dispersion coefficient must be nonzero")
        self.coeffs = arr

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return self.coeffs[-1]

    @property
    def phi(self) -> float:
        """Argument of the leading coefficient, in [-pi/2, pi/2] for valid input."""
        return float(np.angle(self.leading))

    @property
    def is_monomial(self) -> bool:
        """True when omega(xi) = a_n xi^n exactly."""
        return all(c == 0 for c in self.coeffs[:-1])

    def omega(self, xi):
        """Evaluate omega(xi) by Horner's rule (scalar or ndarray)."""
        acc = np.full_like(np.asarray(xi, dtype=complex), self.coeffs[-1])
        for c in self.coeffs[-2::-1]:
            acc = acc * xi + c
        return acc if acc.ndim else complex(acc)

    def omega_prime(self, xi):
        """Evaluate omega'(xi) by Horner's rule (scalar or ndarray)."""
        n = self.degree
        acc = np.full_like(np.asarray(xi, dtype=complex), n * self.coeffs[-1])
        for j in range(n - 1, 0, -1):
            acc = acc * xi + j * self.coeffs[j]
        return acc if acc.ndim else complex(acc)

    def __repr__(self) -> str:
        return f"DispersionPolynomial(degree={self.degree}, coeffs={self.coeffs!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, DispersionPolynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)


def normalize_leading(coeffs: Sequence[complex]) -> tuple[DispersionPolynomial, float]:
    """Rescale a dispersion so the leading coefficient has modulus one.

    Dividing omega by s = |a_n| is the same as rescaling time to t' = s t:
    q(t, x) solves the original equation iff q(t'/s, x) solves the rescaled
    one.  Boundary signals and the horizon must be re-expressed in t' by the
    caller.  Returns the rescaled dispersion and the scale factor s.
    """
    arr = [complex(c) for c in coeffs]
    if not arr or arr[-1] == 0:
        raise ConstraintError("cannot normalize: leading coefficient is zero")
    scale = abs(arr[-1])
    return DispersionPolynomial([c / scale for c in arr]), scale


def unknown_count(n: int, a_n: complex) -> int:
    """Number N of unknown boundary derivatives for degree n, leading a_n.

    N = n/2 for even n (Re a_n >= 0); for odd n, N = (n-1)/2 when a_n = i
    and N = (n+1)/2 when a_n = -i.  Raises ConstraintError for an
    inadmissible leading coefficient.
    """
    if n < 2:
        raise ConstraintError(f"degree must be at least 2, got {n}")
    if abs(abs(a_n) - 1.0) > _LEADING_TOL:
        raise ConstraintError(f"|a_n| must be 1, got {abs(a_n)!r}")
    if n % 2 == 0:
        if a_n.real < -_PARITY_TOL:
            raise ConstraintError("even degree requires Re(a_n) >= 0")
        return n // 2
    if abs(a_n.real) > _PARITY_TOL:
        raise ConstraintError("odd degree requires a_n = +-i")
    return (n - 1) // 2 if a_n.imag > 0 else (n + 1) // 2


# ---------------------------------------------------------------------------
# Boundary signals
# ---------------------------------------------------------------------------


class Signal:
    """A boundary signal g(t) on [0, T].

    Subclasses provide `value` and `derivative`; both raise DomainError
    outside [0, T] (up to a relative slack of 1e-12).
    """

    T: float

    def _check_domain(self, t: float) -> float:
        slack = 1e-12 * (1.0 + self.T)
        if t < -slack or t > self.T + slack:
            raise DomainError(f"signal evaluated at t={t!r} outside [0, {self.T}]")
        return min(max(t, 0.0), self.T)

    def value(self, t: float) -> complex:
        raise NotImplementedError

    def derivative(self, t: float) -> complex:
        raise NotImplementedError

    def values(self, ts: np.ndarray) -> np.ndarray:
        return np.array([self.value(float(t)) for t in ts], dtype=complex)

    def derivatives(self, ts: np.ndarray) -> np.ndarray:
        return np.array([self.derivative(float(t)) for t in ts], dtype=complex)


class CallableSignal(Signal):
    """Signal given by a callable, with an optional analytic derivative.

    Without an analytic derivative, `derivative` falls back to a second
    order central difference (one-sided at the interval ends).
    """

    def __init__(
        self,
        fn: Callable[[float], complex],
        T: float,
        derivative: Callable[[float], complex] | None = None,
    ) -> None:
        if T <= 0:
            raise ConstraintError("signal horizon T must be positive")
        self.fn = fn
        self.T = float(T)
        self._derivative = derivative

    @property
    def has_analytic_derivative(self) -> bool:
        return self._derivative is not None

    def value(self, t: float) -> complex:
        t = self._check_domain(t)
        return complex(self.fn(t))

    def derivative(self, t: float) -> complex:
        t = self._check_domain(t)
        if self._derivative is not None:
            return complex(self._derivative(t))
        h = max(1e-6 * self.T, 1e-9)
        lo, hi = t - h, t + h
        if lo < 0.0:
            lo, hi = 0.0, 2 * h
            return complex(
                (-3 * self.fn(lo) + 4 * self.fn(lo + h) - self.fn(hi)) / (2 * h)
            )
        if hi > self.T:
            hi, lo = self.T, self.T - 2 * h
            return complex(
                (3 * self.fn(hi) - 4 * self.fn(hi - h) + self.fn(lo)) / (2 * h)
            )
        return complex((self.fn(hi) - self.fn(lo)) / (2 * h))


class SampledSignal(Signal):
    """Signal given by uniform samples on [0, T].

    Interior values and derivatives come from a (not-a-knot) cubic spline;
    derivatives at the interval ends use the one-sided quadratic through
    the first/last three samples, which is second order for C^3 signals
    and exact at interior nodes for a linear ramp.
    """

    def __init__(self, values: Sequence[complex], dt: float) -> None:
        vals = np.asarray(values, dtype=complex)
        if vals.ndim != 1 or vals.size < 3:
            raise ConstraintError("sampled signal needs at least 3 uniform samples")
        if dt <= 0:
            raise ConstraintError("sample spacing dt must be positive")
        self.samples = vals
        self.dt = float(dt)
        self.T = float(dt) * (vals.size - 1)
        from scipy.interpolate import CubicSpline

        self._grid = np.arange(vals.size) * self.dt
        self._spline = CubicSpline(self._grid, vals)
        self._dspline = self._spline.derivative()

    def value(self, t: float) -> complex:
        t = self._check_domain(t)
        return complex(self._spline(t))

    def derivative(self, t: float) -> complex:
        t = self._check_domain(t)
        h = self.dt
        edge = 1e-12 * (1.0 + self.T)
        if t <= edge:
            y = self.samples
            return complex((-3 * y[0] + 4 * y[1] - y[2]) / (2 * h))
        if t >= self.T - edge:
            y = self.samples
            return complex((3 * y[-1] - 4 * y[-2] + y[-3]) / (2 * h))
        return complex(self._dspline(t))


def signal_value(signal: Signal, t: float) -> complex:
    """Evaluate a boundary signal at time t (DomainError outside [0, T])."""
    return signal.value(t)


def signal_derivative(signal: Signal, t: float) -> complex:
    """Evaluate a boundary signal's time derivative at t."""
    return signal.derivative(t)


# ---------------------------------------------------------------------------
# Initial data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InitialData:
    """Initial profile q(0, x) on the half-line.

    kind is one of:
      * "zero":         q0 = 0,
      * "exponential":  q0(x) = e^{i k x} with Im k > 0,
      * "callable":     arbitrary decaying profile; `transform_hint`, when
                        given, must be the half-line Fourier transform
                        qhat0(xi) = int_0^inf e^{-i xi x} q0(x) dx as an
                        analytic function of complex xi.
    """

    kind: str = "zero"
    k: complex | None = None
    fn: Callable[[float], complex] | None = None
    transform_hint: Callable[[complex], complex] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("zero", "exponential", "callable"):
            raise ConstraintError(f"unknown initial data kind {self.kind!r}")
        if self.kind == "exponential":
            if self.k is None:
                raise ConstraintError("exponential initial data needs parameter k")
            if complex(self.k).imag <= 0:
                raise DomainError("exponential initial data needs Im k > 0 to decay")
        if self.kind == "callable" and self.fn is None:
            raise ConstraintError("callable initial data needs a function")

    @property
    def value_at_zero(self) -> complex:
        if self.kind == "zero":
            return 0.0 + 0.0j
        if self.kind == "exponential":
            return 1.0 + 0.0j
        return complex(self.fn(0.0))

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"


# ---------------------------------------------------------------------------
# Problem and result containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryValueProblem:
    """A half-line initial boundary value problem.

    given_orders U lists the prescribed derivative orders (sorted, one
    boundary signal each); the map computes the complementary orders V.
    t_min defaults to 1e-3 * T; map results are reported on (t_min, T].
    """

    dispersion: DispersionPolynomial
    given_orders: tuple[int, ...]
    signals: tuple[Signal, ...]
    initial: InitialData = field(default_factory=InitialData)
    T: float = 1.0
    t_min: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "given_orders", tuple(int(u) for u in self.given_orders))
        object.__setattr__(self, "signals", tuple(self.signals))
        if self.t_min is None:
            object.__setattr__(self, "t_min", 1e-3 * self.T)

    @property
    def unknown_orders(self) -> tuple[int, ...]:
        n = self.dispersion.degree
        return tuple(m for m in range(n) if m not in self.given_orders)

    @property
    def is_canonical(self) -> bool:
        """True when U = {0, 1, ..., |U|-1} (the Theorem Two normal form)."""
        return self.given_orders == tuple(range(len(self.given_orders)))

    def signal_for_order(self, u: int) -> Signal:
        return self.signals[self.given_orders.index(u)]


@dataclass(frozen=True)
class Violation:
    """One machine-readable validation failure."""

    code: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


def validate_dispersion(d: DispersionPolynomial) -> list[Violation]:
    """Check degree, leading modulus and the parity constraint on a_n."""
    out: list[Violation] = []
    n = d.degree
    if n < 2:
        out.append(Violation("degree_too_small", f"degree must be >= 2, got {n}"))
        return out
    a_n = d.leading
    if abs(abs(a_n) - 1.0) > _LEADING_TOL:
        out.append(
            Violation(
                "leading_modulus",
                f"|a_n| must equal 1 within {_LEADING_TOL}, got {abs(a_n)!r};"
                " use normalize_leading to rescale time",
            )
        )
        return out
    if n % 2 == 0:
        if a_n.real < -_PARITY_TOL:
            out.append(Violation("parity", "even degree requires Re(a_n) >= 0"))
    elif abs(a_n.real) > _PARITY_TOL:
        out.append(Violation("parity", "odd degree requires a_n = +-i"))
    return out


def validate_problem(problem: BoundaryValueProblem) -> list[Violation]:
    """Validate a boundary value problem; an empty list means valid.

    Checks the dispersion constraints, the index set U (distinct orders in
    [0, n-1] of size n - N), signal count and spans, the time window, and
    order-zero compatibility |g(0) - q0(0)| <= 1e-8 (1 + |q0(0)|).
    """
    out = list(validate_dispersion(problem.dispersion))
    n = problem.dispersion.degree
    U = problem.given_orders

    if len(set(U)) != len(U):
        out.append(Violation("order_duplicate", f"given orders {U} contain duplicates"))
    if any(u < 0 or u >= n for u in U):
        out.append(Violation("order_range", f"given orders {U} outside [0, {n - 1}]"))
    if tuple(sorted(U)) != U:
        out.append(Violation("order_sorted", f"given orders {U} must be sorted"))

    if not any(v.code in ("degree_too_small", "leading_modulus", "parity") for v in out):
        N = unknown_count(n, problem.dispersion.leading)
        if len(U) != n - N:
            out.append(
                Violation(
                    "given_count",
                    f"need {n - N} given orders for this dispersion, got {len(U)}",
                )
            )

    if len(problem.signals) != len(U):
        out.append(
            Violation(
                "signal_count",
                f"{len(U)} given orders but {len(problem.signals)} signals",
            )
        )

    if problem.T <= 0:
        out.append(Violation("time_range", f"horizon T must be positive, got {problem.T}"))
    elif not (0 < problem.t_min < problem.T):
        out.append(
            Violation("time_range", f"need 0 < t_min < T, got t_min={problem.t_min}")
        )

    for u, s in zip(U, problem.signals):
        if s.T < problem.T * (1 - 1e-12):
            out.append(
                Violation(
                    "signal_span",
                    f"signal for order {u} spans [0, {s.T}] < horizon {problem.T}",
                )
            )

    if 0 in U and len(problem.signals) == len(U) and problem.T > 0:
        g0 = problem.signal_for_order(0)
        try:
            mismatch = abs(g0.value(0.0) - problem.initial.value_at_zero)
        except DomainError:
            mismatch = None
        if mismatch is not None:
            bound = _COMPAT_TOL * (1.0 + abs(problem.initial.value_at_zero))
            if mismatch > bound:
                out.append(
                    Violation(
                        "compatibility",
                        f"|g(0) - q0(0)| = {mismatch:.3e} exceeds {bound:.3e}",
                    )
                )
    return out


@dataclass(frozen=True)
class DNMapResult:
    """Computed boundary derivative series.

    values[m] is the complex series for unknown order orders[m] on `grid`
    (strictly increasing, starting at or above the problem's t_min).
    diagnostics carries per-term magnitude breakdowns and quadrature error
    estimates; params records contour/grid parameters actually used.
    """

    orders: tuple[int, ...]
    grid: np.ndarray
    values: tuple[np.ndarray, ...]
    diagnostics: dict
    params: dict

    def __post_init__(self) -> None:
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise ConstraintError("result grid must be a nonempty 1-d array")
        if not np.all(np.diff(g) > 0):
            raise ConstraintError("result grid must be strictly increasing")
        if g[0] <= 0:
            raise ConstraintError("result grid must start at positive time")
        if len(self.values) != len(self.orders):
            raise ConstraintError("one value series per unknown order required")

    def series(self, v: int) -> np.ndarray:
        return self.values[self.orders.index(v)]
