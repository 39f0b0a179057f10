"""Series construction of the joint density and its positivity certificate.

For an admissible ``q`` and the scaled base density ``p``, the inverse Fourier
transform of ``q(t)**n * prod_j phi_p(t_j)`` is the real field::

    S_n(x) = sum_{(k, c) in q**n} c * i**|k| * prod_j D^{k_j} p(x_j)

and ``r = prod_j p(x_j) + sum_{n>=1} S_n / n!`` has characteristic function
``exp(q) * prod_j phi_p``.  If ``|D^m p| <= (eps*C3)**m p`` then
``|S_n| <= beta**n prod_j p`` with ``beta = s*a*eps**2*C3**d``, so
``r >= prod_j p * (1 - (exp(beta) - 1))``.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .basedensity import (
    C3Estimate,
    ScaledDensity,
    epsilon_max,
    estimate_C3,
    interval_mass,
    tail_span,
)
from .errors import ArityError, DerivativeOrderError, GridMassError, InadmissiblePolynomialError
from .grid import GridSpec, SampledField, outer
from .poly import MultiPoly, check_admissible, poly_pow, poly_stats

__all__ = [
    "Certificate",
    "DerivativeCache",
    "build_sn",
    "build_density",
    "tail_bound",
    "default_grid",
    "default_c3_grid",
    "grid_mass",
    "MAX_ARITY",
]

log = logging.getLogger(__name__)

MAX_ARITY = 4
REALNESS_TOL = 1e-10
NORMALIZATION_TOL = 1e-4
MIN_GRID_MASS = 1.0 - 1e-6
_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


def tail_bound(beta: float, N: int) -> float:
    """Upper bound ``exp(beta) * beta**(N+1) / (N+1)!`` on ``sum_{n>N} beta**n/n!``."""
    if beta < 0 or N < 0:
        raise ValueError("tail_bound needs beta >= 0 and N >= 0")
    if beta == 0:
        return 0.0
    return math.exp(beta + (N + 1) * math.log(beta) - math.lgamma(N + 2))


def _require_admissible(q: MultiPoly):
    report = check_admissible(q)
    if not report.verdict:
        raise InadmissiblePolynomialError(report)
    return report


class DerivativeCache:
    """Per-axis tables ``D^m p(x_j)``, grown on demand and reused across terms."""

    def __init__(self, p: ScaledDensity, grid: GridSpec):
        self.p = p
        self.grid = grid
        self._tables = [None] * grid.ndim

    def order(self, axis: int) -> int:
        table = self._tables[axis]
        return -1 if table is None else table.shape[0] - 1

    def ensure(self, max_order: int):
        if max_order > self.p.base.m_max:
            raise DerivativeOrderError(
                f"derivative order {max_order} exceeds M_max={self.p.base.m_max}"
            )
        for ax in range(self.grid.ndim):
            if self.order(ax) < max_order:
                self._tables[ax] = self.p.derivative_table(max_order, self.grid.points(ax))

    def get(self, axis: int, m: int) -> np.ndarray:
        if self.order(axis) < m:
            self.ensure(m)
        return self._tables[axis][m]


def build_sn(
    q: MultiPoly,
    p: ScaledDensity,
    n: int,
    grid: GridSpec,
    cache: DerivativeCache | None = None,
    check: bool = True,
) -> SampledField:
    """The ``n``-th series field ``S_n`` on ``grid``.

    With ``check=False`` admissibility is not enforced and the result may
    carry a genuine imaginary part; this is how the realness property is
    probed for inadmissible polynomials.
    """
    if q.arity != grid.ndim:
        raise ArityError(f"polynomial arity {q.arity} != grid dimension {grid.ndim}")
    if check:
        _require_admissible(q)
    if n < 1:
        raise ValueError("n must be >= 1")
    cache = cache or DerivativeCache(p, grid)
    values = np.zeros(grid.shape, dtype=complex)
    if q.is_zero:
        return SampledField(grid, values, "sn_term")
    qn = poly_pow(q, n)
    cache.ensure(max(max(k) for k in qn.terms))
    for exps, coef in qn:
        factor = coef * _I_POWERS[sum(exps) % 4]
        values += factor * outer([cache.get(ax, k) for ax, k in enumerate(exps)])
    field = SampledField(grid, values, "sn_term")
    if check and field.max_imag_ratio() > REALNESS_TOL:
        raise FloatingPointError(
            f"S_{n} has relative imaginary part {field.max_imag_ratio():.3g} > {REALNESS_TOL}"
        )
    return field


@dataclass(frozen=True)
class Certificate:
    s: int
    a: float
    d: int
    C3: float
    epsilon: float
    beta: float
    analytic_margin: float
    truncation_order: int
    tail_bound: float
    numeric_min_ratio: float
    valid_to_order: int
    min_value: float
    integral: float
    epsilon_max: float | None
    verdict: str

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_dict(self) -> dict:
        return asdict(self)


def grid_mass(p: ScaledDensity, grid: GridSpec) -> float:
    """Mass of ``prod_j p(x_j)`` inside the grid box."""
    eps = p.epsilon
    return math.prod(interval_mass(p.base, eps * a.min, eps * a.max) for a in grid.axes)


def default_grid(p: ScaledDensity, ndim: int, count: int | None = None,
                 span: float | None = None, tail: float = 1e-7) -> GridSpec:
    """Symmetric grid ``[-L, L]**ndim`` with ``int_{|x|>L} p < tail`` by default."""
    if count is None:
        count = 8192 if ndim == 1 else 1024
    if span is None:
        span = tail_span(p.base, tail) / p.epsilon
    return GridSpec.uniform(-span, span, count, ndim)


def default_c3_grid(f, count: int = 4097, tail: float = 1e-8) -> GridSpec:
    """Dense base-variable grid for estimating the derivative constant."""
    y = tail_span(f, tail)
    return GridSpec.uniform(-y, y, count)


def _stats(q: MultiPoly):
    if q.is_zero:
        return 0, 0.0, 0, 2
    s, a, d = poly_stats(q)
    # without univariate monomials every term has total degree >= 2
    kmin = min(2, q.min_degree) if q.arity == 1 else 2
    return s, a, d, kmin


def build_density(
    q: MultiPoly,
    p: ScaledDensity,
    grid: GridSpec,
    N: int = 12,
    tol: float = 1e-12,
    c3: C3Estimate | None = None,
) -> tuple[SampledField, Certificate]:
    """Truncated series density and its certificate.

    ``c3`` supplies the derivative constant; when omitted it is estimated on
    a dense base grid up to order ``N * deg q``.  The verdict is PASS when the
    analytic margin exceeds the truncation bound, the sampled density is
    positive, and its trapezoidal integral is within 1e-4 of one.
    """
    if q.arity > MAX_ARITY:
        raise ArityError(f"arity {q.arity} exceeds the supported maximum {MAX_ARITY}")
    if q.arity != grid.ndim:
        raise ArityError(f"polynomial arity {q.arity} != grid dimension {grid.ndim}")
    _require_admissible(q)
    s, a, d, kmin = _stats(q)
    if N * d > p.base.m_max:
        raise DerivativeOrderError(f"N*d = {N * d} exceeds M_max={p.base.m_max}")
    mass = grid_mass(p, grid)
    if mass < MIN_GRID_MASS:
        raise GridMassError(f"grid holds only {mass:.9f} of the product mass")

    eps = p.epsilon
    if q.is_zero:
        C3, order, eps_max = 1.0, 0, None
    else:
        if c3 is None:
            c3 = estimate_C3(p.base, max(1, N * d), default_c3_grid(p.base))
        C3, order = c3.value, c3.max_order
        eps_max = epsilon_max(s, a, d, C3, kmin)
        if eps >= eps_max:
            warnings.warn(
                f"epsilon={eps:.4g} is not below the certified bound {eps_max:.4g}",
                RuntimeWarning,
                stacklevel=2,
            )
    beta = s * a * eps**kmin * C3**d

    cache = DerivativeCache(p, grid)
    cache.ensure(0)
    base = outer([cache.get(ax, 0) for ax in range(grid.ndim)])
    base_max = float(base.max())
    r = base.copy()
    used = 0
    for n in range(1, N + 1):
        if q.is_zero:
            break
        sn = build_sn(q, p, n, grid, cache=cache).real
        term = sn / math.factorial(n)
        r += term
        used = n
        size = float(np.max(np.abs(term))) / base_max
        log.debug("S_%d/%d! relative size %.3g", n, n, size)
        if size < tol:
            break

    margin = 1.0 - (math.exp(beta) - 1.0)
    tb = tail_bound(beta, used)
    field = SampledField(grid, r, "density")
    integral = float(field.integrate())
    min_value = float(r.min())
    min_ratio = float(np.min(r / base))
    passed = (margin - tb > 0) and min_value > 0 and abs(integral - 1.0) <= NORMALIZATION_TOL
    cert = Certificate(
        s=int(s), a=float(a), d=int(d), C3=float(C3), epsilon=eps, beta=beta,
        analytic_margin=margin, truncation_order=used, tail_bound=tb,
        numeric_min_ratio=min_ratio, valid_to_order=int(order), min_value=min_value,
        integral=integral, epsilon_max=eps_max, verdict="PASS" if passed else "FAIL",
    )
    return field, cert
