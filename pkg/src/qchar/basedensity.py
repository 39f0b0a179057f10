"""Band-limited, strictly positive base densities.

The family used here is a two-component Fejér-type mixture::

    f(x) = c * (g(x) + g(x - shift)) / 2,     g(x) = (sin(x/2) / (x/2))**power

``g`` vanishes only on ``2*pi*Z \\ {0}``; shifting the second component off that
lattice makes ``f`` strictly positive.  The Fourier transform of
``sin(x/2)/(x/2)`` is ``2*pi`` times the indicator of ``[-1/2, 1/2]``, so the
characteristic function of ``g`` is a centred cardinal B-spline of order
``power`` supported on ``[-power/2, power/2]``.  Hence ``f`` is band-limited
and every derivative is an exact finite Fourier integral over that band.

Fourier convention (used throughout the package)::

    phi(t) = int exp(+i t x) f(x) dx,    f(x) = (2 pi)^-1 int exp(-i t x) phi(t) dt

The derivative bound ``|f^(m)| <= C3**m f`` holds for this family only up to a
finite order; :func:`estimate_C3` measures the smallest such constant on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from scipy.interpolate import BSpline
from scipy.optimize import brentq

from .errors import CoarseGridError, DerivativeOrderError, GridMassError
from .grid import GridSpec

__all__ = [
    "BaseDensity",
    "ScaledDensity",
    "C3Estimate",
    "make_base",
    "density_eval",
    "cf_eval",
    "density_deriv",
    "derivative_table",
    "scale",
    "estimate_C3",
    "epsilon_max",
    "interval_mass",
    "tail_span",
]

TWO_PI = 2.0 * math.pi
TAYLOR_CUTOFF = 1e-4
NODES_PER_PANEL_MIN = 8
MAX_GL_ORDER = 64

# sin(u)/u = sum_k (-1)^k u^(2k) / (2k+1)!
_SINC_TAYLOR = [(-1) ** k / math.factorial(2 * k + 1) for k in range(6)]


def _sinc_half(x):
    """``sin(x/2) / (x/2)`` with a 6-term Taylor expansion near the origin."""
    u = 0.5 * np.asarray(x, dtype=float)
    small = np.abs(u) < TAYLOR_CUTOFF
    safe = np.where(small, 1.0, u)
    series = np.polynomial.polynomial.polyval(u * u, _SINC_TAYLOR)
    return np.where(small, series, np.sin(safe) / safe)


@lru_cache(maxsize=32)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _gl_panels(lo: float, hi: float, n_panels: int, per_panel: int):
    """Composite Gauss-Legendre nodes and weights on equal panels of [lo, hi].

    Panels needing more than ``MAX_GL_ORDER`` nodes are split evenly, which
    keeps every sub-rule cheap to build and well conditioned.
    """
    split = math.ceil(per_panel / MAX_GL_ORDER)
    n_panels, per_panel = n_panels * split, math.ceil(per_panel / split)
    u, w = _leggauss(per_panel)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    t = (mid[:, None] + half[:, None] * u[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return t, wt


@dataclass(frozen=True)
class BaseDensity:
    """Fejér-mixture density; build with :func:`make_base`.

    ``band_limit`` is ``power / 2``: the characteristic function vanishes
    outside ``[-band_limit, band_limit]``.  Spectral quadrature uses
    ``quadrature_order`` Gauss-Legendre nodes split evenly over the spline
    knot intervals, where the characteristic function is smooth.
    """

    power: int
    shift: float
    band_limit: float
    norm_constant: float
    m_max: int = 64
    quadrature_order: int = 256

    @cached_property
    def _spline(self) -> BSpline:
        knots = np.arange(self.power + 1, dtype=float) - self.power / 2
        return BSpline.basis_element(knots, extrapolate=False)

    @cached_property
    def _spline_at_zero(self) -> float:
        return float(self._spline(0.0))

    @property
    def n_panels(self) -> int:
        return int(self.power)

    @cached_property
    def spectral_nodes(self) -> tuple:
        """``(t, w)`` quadrature rule on ``[-band_limit, band_limit]``."""
        per_panel = max(NODES_PER_PANEL_MIN, math.ceil(self.quadrature_order / self.n_panels))
        return _gl_panels(-self.band_limit, self.band_limit, self.n_panels, per_panel)

    def nodes_for_reach(self, reach: float) -> tuple:
        """Quadrature rule accurate for ``exp(-i t x)`` kernels with ``|x| <= reach``.

        Each unit panel needs about ``reach / 2`` nodes to follow the phase;
        below that the default rule is returned unchanged.
        """
        t, w = self.spectral_nodes
        needed = math.ceil(0.5 * reach) + 24
        if needed <= len(t) // self.n_panels:
            return t, w
        return _gl_panels(-self.band_limit, self.band_limit, self.n_panels, needed)

    def spline_cf(self, t) -> np.ndarray:
        """Characteristic function of a single normalised ``g`` component."""
        # the centred spline is even; evaluating at |t| keeps phi(-t) = conj(phi(t)) bitwise
        t = np.abs(np.asarray(t, dtype=float))
        v = self._spline(t)
        return np.nan_to_num(v, nan=0.0) / self._spline_at_zero

    def to_dict(self) -> dict:
        return {
            "power": self.power,
            "shift": self.shift,
            "band_limit": self.band_limit,
            "norm_constant": self.norm_constant,
            "M_max": self.m_max,
            "quadrature_order": self.quadrature_order,
        }


def make_base(
    power: int = 8, shift: float = 1.0, m_max: int = 64, quadrature_order: int = 256
) -> BaseDensity:
    """Build the mixture density with the given Fejér exponent and offset."""
    if not isinstance(power, (int, np.integer)) or power < 4 or power % 2:
        raise ValueError(f"power must be an even integer >= 4, got {power!r}")
    if not shift > 0:
        raise ValueError(f"shift must be positive, got {shift!r}")
    r = math.fmod(shift, TWO_PI)
    if min(r, TWO_PI - r) < 1e-9:
        raise ValueError("shift is a multiple of 2*pi: both components share their zeros")
    if m_max < 0:
        raise ValueError("m_max must be non-negative")
    knots = np.arange(power + 1, dtype=float) - power / 2
    b0 = float(BSpline.basis_element(knots, extrapolate=False)(0.0))
    # int g = 2*pi * B(0), with B the centred cardinal spline of order `power`
    return BaseDensity(
        power=int(power),
        shift=float(shift),
        band_limit=power / 2,
        norm_constant=1.0 / (TWO_PI * b0),
        m_max=int(m_max),
        quadrature_order=int(quadrature_order),
    )


def density_eval(f: BaseDensity, x):
    """Closed-form density value(s); strictly positive everywhere."""
    x = np.asarray(x, dtype=float)
    g0 = _sinc_half(x) ** f.power
    g1 = _sinc_half(x - f.shift) ** f.power
    out = 0.5 * f.norm_constant * (g0 + g1)
    return float(out) if out.ndim == 0 else out


def cf_eval(f: BaseDensity, t):
    """Characteristic function; identically zero for ``|t| > band_limit``."""
    t = np.asarray(t, dtype=float)
    out = f.spline_cf(t) * 0.5 * (1.0 + np.exp(1j * f.shift * t))
    return complex(out) if out.ndim == 0 else out


def derivative_table(f: BaseDensity, max_order: int, x, chunk: int = 4096) -> np.ndarray:
    """Derivatives of orders ``0..max_order`` at ``x``; shape ``(max_order+1, len(x))``.

    ``f^(m)(x) = (2 pi)^-1 int_{-B}^{B} (-i t)^m exp(-i t x) phi(t) dt`` by the
    quadrature rule from :meth:`BaseDensity.nodes_for_reach`.
    """
    if max_order > f.m_max:
        raise DerivativeOrderError(f"derivative order {max_order} exceeds M_max={f.m_max}")
    if max_order < 0:
        raise ValueError("derivative order must be non-negative")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t, w = f.nodes_for_reach(float(np.max(np.abs(x))) if x.size else 0.0)
    weighted = w * cf_eval(f, t) / TWO_PI
    orders = np.arange(max_order + 1)
    kernel = (-1j * t)[:, None] ** orders[None, :] * weighted[:, None]
    out = np.empty((max_order + 1, x.size))
    for start in range(0, x.size, chunk):
        xs = x[start : start + chunk]
        phase = np.exp(-1j * np.outer(xs, t))
        out[:, start : start + chunk] = (phase @ kernel).real.T
    return out


def density_deriv(f: BaseDensity, m: int, x):
    """``m``-th derivative of the base density by spectral quadrature."""
    if m > f.m_max:
        raise DerivativeOrderError(f"derivative order {m} exceeds M_max={f.m_max}")
    scalar = np.ndim(x) == 0
    out = derivative_table(f, m, x)[m]
    return float(out[0]) if scalar else out.reshape(np.shape(x))


@dataclass(frozen=True)
class ScaledDensity:
    """``p(x) = epsilon * f(epsilon * x)`` with CF ``phi(t / epsilon)``."""

    base: BaseDensity
    epsilon: float

    @property
    def band_limit(self) -> float:
        return self.epsilon * self.base.band_limit

    def pdf(self, x):
        return self.epsilon * density_eval(self.base, self.epsilon * np.asarray(x, dtype=float))

    def cf(self, t):
        return cf_eval(self.base, np.asarray(t, dtype=float) / self.epsilon)

    def deriv(self, m: int, x):
        """``D^m p(x) = epsilon**(m+1) * f^(m)(epsilon * x)``."""
        return self.epsilon ** (m + 1) * density_deriv(self.base, m, self.epsilon * np.asarray(x))

    def derivative_table(self, max_order: int, x) -> np.ndarray:
        table = derivative_table(self.base, max_order, self.epsilon * np.asarray(x, dtype=float))
        powers = self.epsilon ** (np.arange(max_order + 1) + 1)
        return table * powers[:, None]

    def spectral_nodes(self, reach: float = 0.0) -> tuple:
        """Rule on ``[-band_limit, band_limit]`` for kernels with ``|x| <= reach``."""
        t, w = self.base.nodes_for_reach(self.epsilon * reach)
        return self.epsilon * t, self.epsilon * w


def scale(f: BaseDensity, epsilon: float) -> ScaledDensity:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    return ScaledDensity(f, float(epsilon))


def interval_mass(f: BaseDensity, a: float, b: float) -> float:
    """``int_a^b f`` computed from the characteristic function."""
    reach = max(abs(a), abs(b), 1.0)
    per_panel = max(32, math.ceil(2.0 * reach) + 16)
    t, w = _gl_panels(-f.band_limit, f.band_limit, f.n_panels, per_panel)
    # (exp(-i t a) - exp(-i t b)) / (i t); GL nodes never hit t = 0
    kern = (np.exp(-1j * t * a) - np.exp(-1j * t * b)) / (1j * t)
    return float(np.sum(w * cf_eval(f, t) * kern).real / TWO_PI)


def tail_span(f: BaseDensity, tail: float = 1e-7) -> float:
    """Smallest ``Y`` with ``int_{|x| > Y} f < tail`` (to root-finding accuracy)."""
    def excess(y):
        return math.log(max(1.0 - interval_mass(f, -y, y), 1e-300)) - math.log(tail)

    lo, hi = 1.0, 2.0
    while excess(hi) > 0:
        lo, hi = hi, 2 * hi
        if hi > 1e4:
            raise GridMassError(f"tail mass {tail} not reached within |x| < 1e4")
    y = brentq(excess, lo, hi, xtol=1e-6)
    return y * (1 + 1e-6)


@dataclass(frozen=True)
class C3Estimate:
    max_order: int
    value: float
    grid: GridSpec
    per_order: tuple = field(default_factory=tuple)
    bound_held: tuple = field(default_factory=tuple)
    argmax: tuple = (0.0, 0)

    def to_dict(self) -> dict:
        return {
            "max_order": self.max_order,
            "value": self.value,
            "grid": self.grid.to_dict(),
            "per_order": list(self.per_order),
            "bound_held": list(self.bound_held),
            "argmax": {"x": self.argmax[0], "order": self.argmax[1]},
        }


def estimate_C3(
    f: BaseDensity,
    M: int,
    grid: GridSpec,
    max_tail_mass: float = 1e-8,
    max_jump: float = 0.5,
) -> C3Estimate:
    """Smallest ``C >= 1`` with ``|f^(m)| <= C**m f`` on the grid for ``m <= M``.

    Raises :class:`GridMassError` when the grid leaves more than
    ``max_tail_mass`` outside, and :class:`CoarseGridError` when neighbouring
    density values differ by more than ``max_jump`` (relative), i.e. the grid
    does not resolve the narrow dips of ``f`` where the ratios peak.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if grid.ndim != 1:
        raise ValueError("C3 estimation needs a one-dimensional grid")
    ax = grid.axes[0]
    outside = 1.0 - interval_mass(f, ax.min, ax.max)
    if outside > max_tail_mass:
        raise GridMassError(f"grid leaves mass {outside:.3g} outside (limit {max_tail_mass:.3g})")
    x = grid.points(0)
    fx = density_eval(f, x)
    table = np.abs(derivative_table(f, M, x)[1:])
    orders = np.arange(1, M + 1)
    ratios = (table / fx[None, :]) ** (1.0 / orders[:, None])
    lo, hi = np.minimum(fx[1:], fx[:-1]), np.maximum(fx[1:], fx[:-1])
    jumps = hi / lo - 1.0
    if jumps.max() > max_jump:
        i = int(jumps.argmax())
        raise CoarseGridError(
            f"density changes by {jumps[i]:.0%} between neighbours near x={x[i]:.4g}; "
            "refine the grid"
        )
    per_order = ratios.max(axis=1)
    m_star, i_star = np.unravel_index(np.argmax(ratios), ratios.shape)
    value = max(1.0, float(per_order.max()))
    slack = 1.0 + 1e-12
    held = tuple(
        bool(np.all(table[m - 1] <= value**m * fx * slack)) for m in orders
    )
    return C3Estimate(
        max_order=int(M),
        value=value,
        grid=grid,
        per_order=tuple(float(v) for v in per_order),
        bound_held=held,
        argmax=(float(x[i_star]), int(m_star) + 1),
    )


def epsilon_max(s: int, a: float, d: int, C3: float, min_degree: int = 2) -> float:
    """Supremum of ``epsilon`` with ``exp(epsilon**min_degree * s*a*C3**d) - 1 < 1``.

    With ``min_degree=2`` (no monomial of total degree 1) this is
    ``sqrt(ln 2 / (s a C3^d))``.
    """
    if math.isinf(C3):
        return 0.0
    log_denom = math.log(s) + math.log(a) + d * math.log(C3)
    return math.exp((math.log(math.log(2.0)) - log_denom) / min_degree)
