"""End-to-end runs: sufficiency pipeline, falsification, random corpus."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .basedensity import epsilon_max, estimate_C3, scale
from .config import PipelineConfig
from .construct import build_density, default_c3_grid, default_grid
from .errors import AdmissiblePolynomialError, InadmissiblePolynomialError
from .poly import (
    MultiPoly,
    ViolationKind,
    check_admissible,
    format_poly,
    poly_stats,
    random_sparse_poly,
)
from .grid import SampledField
from .spectral import (
    TargetCF,
    cf_property_check,
    forward_check,
    hermitian_residual,
    invert_cf,
    invert_slice,
)

__all__ = [
    "VerdictReport",
    "FalsificationReport",
    "CorpusRow",
    "run_sufficiency",
    "run_falsification",
    "run_corpus",
    "select_epsilon",
    "rederive_admissible",
]

log = logging.getLogger(__name__)

CROSS_TOL = 1e-5
MARGINAL_TOL = 1e-5
FORWARD_TOL = 1e-5
HERMITIAN_SIGNAL = 1e-2
IMAG_MASS_SIGNAL = 1e-3
MARGINAL_SIGNAL = 1e-3
SEPARATION = 1e3

CONDITIONS = {
    ("independence", ViolationKind.UNIVARIATE_MONOMIAL): (
        "i", "no monomial may depend on a single variable"),
    ("independence", ViolationKind.PARITY_VIOLATION): (
        "ii", "coefficients real for even total degree, imaginary for odd"),
    ("identical", ViolationKind.PARITY_VIOLATION): (
        "ii'", "coefficients real for even degree, imaginary for odd"),
}


def _mode(q: MultiPoly) -> str:
    return "identical" if q.arity == 1 else "independence"


def select_epsilon(q: MultiPoly, config: PipelineConfig):
    """Return ``(epsilon, epsilon_max, C3Estimate | None)`` for ``q``.

    An explicit ``config.epsilon`` wins; otherwise ``epsilon_fraction`` of the
    certified bound, capped below one.
    """
    base = config.base()
    c3 = None
    eps_max = None
    if not q.is_zero:
        s, a, d = poly_stats(q)
        kmin = min(2, q.min_degree) if q.arity == 1 else 2
        order = max(1, config.truncation * d)
        c3 = estimate_C3(base, order, default_c3_grid(base, config.c3_grid_count))
        eps_max = epsilon_max(s, a, d, c3.value, kmin)
    if config.epsilon is not None:
        return config.epsilon, eps_max, c3
    bound = 1.0 if eps_max is None else min(eps_max, 1.0)
    return config.epsilon_fraction * bound, eps_max, c3


def _box_samples(p, arity, n, rng):
    b = p.band_limit
    return rng.uniform(-b, b, size=(n, arity))


@dataclass
class VerdictReport:
    poly: str
    arity: int
    mode: str
    config: dict
    admissibility: dict
    epsilon: float
    epsilon_max: float | None
    c3: dict | None
    grid: dict
    certificate: dict
    cross_check: float
    marginal_errors: list
    forward_error: float
    cf_properties: dict
    checks: dict
    verdict: str
    elapsed: float = field(default=0.0, compare=False)
    r_series: object = field(default=None, repr=False, compare=False)
    r_spectral: object = field(default=None, repr=False, compare=False)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_dict(self) -> dict:
        return {
            "kind": "verdict",
            "poly": self.poly,
            "arity": self.arity,
            "mode": self.mode,
            "config": self.config,
            "admissibility": self.admissibility,
            "epsilon": self.epsilon,
            "epsilon_max": self.epsilon_max,
            "c3": self.c3,
            "grid": self.grid,
            "certificate": self.certificate,
            "cross_check": self.cross_check,
            "marginal_errors": self.marginal_errors,
            "forward_error": self.forward_error,
            "cf_properties": self.cf_properties,
            "checks": self.checks,
            "verdict": self.verdict,
        }


def _c3_summary(c3):
    if c3 is None:
        return None
    return {"value": c3.value, "max_order": c3.max_order,
            "argmax_x": c3.argmax[0], "argmax_order": c3.argmax[1]}


def run_sufficiency(q: MultiPoly, config: PipelineConfig | None = None) -> VerdictReport:
    """Build the density by the series, then confirm it by the spectral path.

    Stages: statistics and C3, epsilon selection, series density with
    certificate, spectral inversion and cross-check, marginal identity,
    forward transform, and characteristic-function properties.
    """
    config = config or PipelineConfig()
    start = time.perf_counter()
    report = check_admissible(q)
    if not report.verdict:
        raise InadmissiblePolynomialError(report)
    eps, eps_max, c3 = select_epsilon(q, config)
    p = scale(config.base(), eps)
    grid = default_grid(p, q.arity, config.grid_count, config.grid_span, config.grid_tail)
    r, cert = build_density(q, p, grid, N=config.truncation, tol=config.tol, c3=c3)
    log.info("series density built: %s", cert.verdict)

    T = TargetCF(q, p)
    r_spec = invert_cf(T, grid)
    cross = float(np.max(np.abs(r.values - r_spec.values)) / np.max(np.abs(r_spec.values)))

    marginals = []
    if q.arity > 1:
        for ax in range(q.arity):
            marginals.append(float(np.max(np.abs(r.marginal(ax) - p.pdf(grid.points(ax))))))

    rng = np.random.default_rng(config.seed)
    samples = _box_samples(p, q.arity, config.forward_samples, rng)
    fwd = forward_check(r, T, samples)
    props = cf_property_check(T, m=config.gram_size, seed=config.seed)

    checks = {
        "certificate": cert.passed,
        "cross_check": cross <= CROSS_TOL,
        "marginals": all(m <= MARGINAL_TOL for m in marginals),
        "forward": fwd <= FORWARD_TOL,
        "cf_properties": props.verdict,
    }
    return VerdictReport(
        poly=format_poly(q),
        arity=q.arity,
        mode=_mode(q),
        config=config.to_dict(),
        admissibility=report.to_dict(),
        epsilon=eps,
        epsilon_max=eps_max,
        c3=_c3_summary(c3),
        grid=grid.to_dict(),
        certificate=cert.to_dict(),
        cross_check=cross,
        marginal_errors=marginals,
        forward_error=fwd,
        cf_properties=props.to_dict(),
        checks=checks,
        verdict="PASS" if all(checks.values()) else "FAIL",
        elapsed=time.perf_counter() - start,
        r_series=r,
        r_spectral=r_spec,
    )


@dataclass
class FalsificationReport:
    poly: str
    arity: int
    mode: str
    config: dict
    admissibility: dict
    epsilon: float
    detectors: dict
    null_detectors: dict
    findings: list
    verdict: str
    attempts: list = field(default_factory=list)

    @property
    def detected(self) -> bool:
        return self.verdict == "DETECTED"

    @property
    def conditions(self) -> list:
        return [f["condition"] for f in self.findings if f["detected"]]

    def to_dict(self) -> dict:
        return {
            "kind": "falsification",
            "poly": self.poly,
            "arity": self.arity,
            "mode": self.mode,
            "config": self.config,
            "admissibility": self.admissibility,
            "epsilon": self.epsilon,
            "detectors": self.detectors,
            "null_detectors": self.null_detectors,
            "findings": self.findings,
            "attempts": self.attempts,
            "verdict": self.verdict,
        }


def _detectors(T: TargetCF, grid, points) -> dict:
    r_spec = invert_cf(T, grid)
    imag_mass = float(SampledField(grid, np.abs(r_spec.values.imag), "density").integrate())
    marginal = []
    if T.arity > 1:
        for ax in range(T.arity):
            x = grid.points(ax)
            marg = invert_slice(T, ax, x)
            marginal.append(float(np.max(np.abs(marg - T.p.pdf(x)))))
    return {
        "hermitian_residual": hermitian_residual(T, points),
        "imag_mass": imag_mass,
        "marginal_mismatch": marginal,
        "min_real_density": float(np.min(r_spec.values.real)),
    }


def _finding(condition, description, kind, detector, signal, threshold, null):
    separation = float("inf") if null == 0 else signal / null
    return {
        "condition": condition,
        "description": description,
        "kind": kind.value,
        "detector": detector,
        "signal": signal,
        "threshold": threshold,
        "null_floor": null,
        "separation": separation if np.isfinite(separation) else None,
        "detected": bool(signal >= threshold and separation >= SEPARATION),
    }


def _falsify_at(q, report, eps, config):
    p = scale(config.base(), eps)
    grid = default_grid(p, q.arity, config.grid_count, config.grid_span, config.grid_tail)
    rng = np.random.default_rng(config.seed)
    points = _box_samples(p, q.arity, 256, rng)

    det = _detectors(TargetCF(q, p), grid, points)
    null = _detectors(TargetCF(MultiPoly.zero(q.arity), p), grid, points)

    mode = _mode(q)
    findings = []
    for kind in sorted(report.kinds, key=lambda k: k.value):
        condition, description = CONDITIONS[(mode, kind)]
        if kind is ViolationKind.PARITY_VIOLATION:
            herm = _finding(condition, description, kind, "hermitian_residual",
                            det["hermitian_residual"], HERMITIAN_SIGNAL,
                            null["hermitian_residual"])
            imag = _finding(condition, description, kind, "imag_mass",
                            det["imag_mass"], IMAG_MASS_SIGNAL, null["imag_mass"])
            findings.append(herm if herm["detected"] or not imag["detected"] else imag)
        else:
            ax = int(np.argmax(det["marginal_mismatch"]))
            findings.append(_finding(condition, description, kind,
                                     f"marginal_mismatch[{ax}]",
                                     det["marginal_mismatch"][ax], MARGINAL_SIGNAL,
                                     max(null["marginal_mismatch"])))
    return det, null, findings


def run_falsification(q: MultiPoly, config: PipelineConfig | None = None) -> FalsificationReport:
    """Show which characteristic-function property breaks for an inadmissible ``q``.

    Parity violations are detected through the Hermitian residual of the
    target (or the imaginary mass of its inverse); univariate monomials
    through the marginal mismatch, i.e. ``Phi(0, t2) != phi(t2)``.  Every
    detector is also run for ``q = 0`` to establish the noise floor.

    The violation exists at every scale, so when a finding stays under its
    threshold the run is repeated on the wider boxes of
    ``config.falsify_ladder``.  An explicit ``config.epsilon`` pins a single run.
    """
    config = config or PipelineConfig()
    report = check_admissible(q)
    if report.verdict:
        raise AdmissiblePolynomialError(f"{format_poly(q)} is admissible; nothing to falsify")
    if config.epsilon is not None:
        ladder = [config.epsilon]
    else:
        ladder = [config.falsify_epsilon]
        ladder += sorted(e for e in config.falsify_ladder if e > config.falsify_epsilon)

    attempts = []
    for eps in ladder:
        det, null, findings = _falsify_at(q, report, eps, config)
        detected = all(f["detected"] for f in findings)
        attempts.append({"epsilon": eps, "detected": detected})
        if detected:
            break
    log.info("falsification attempts: %s", attempts)
    return FalsificationReport(
        poly=format_poly(q),
        arity=q.arity,
        mode=_mode(q),
        config=config.to_dict(),
        admissibility=report.to_dict(),
        epsilon=eps,
        detectors=det,
        null_detectors=null,
        findings=findings,
        verdict="DETECTED" if detected else "NOT_DETECTED",
        attempts=attempts,
    )


def rederive_admissible(q: MultiPoly) -> bool:
    """Admissibility written directly from the violation definitions."""
    for exps, coef in q.terms.items():
        if q.arity > 1 and len([k for k in exps if k > 0]) == 1:
            return False
        if (-1) ** sum(exps) * coef.conjugate() != coef:
            return False
    return True


@dataclass
class CorpusRow:
    index: int
    poly: str
    checker: bool
    rederived: bool
    route: str
    verdict: str
    expected: bool

    @property
    def routing_error(self) -> bool:
        return self.checker != self.rederived or not self.expected


def run_corpus(n: int = 200, seed: int = 7, config: PipelineConfig | None = None,
               run_pipelines: bool = True) -> list:
    """Route random sparse arity-2 polynomials to sufficiency or falsification.

    With ``run_pipelines=False`` only the two admissibility verdicts are
    compared.  Pipelines use ``config.corpus_grid_count`` points per axis
    unless ``grid_count`` is set explicitly.
    """
    config = config or PipelineConfig()
    run_cfg = config.updated(grid_count=config.grid_count or config.corpus_grid_count)
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        q = random_sparse_poly(rng, arity=2, max_degree=4)
        checker = check_admissible(q).verdict
        rederived = rederive_admissible(q)
        route = "sufficiency" if checker else "falsification"
        verdict, expected = "", checker == rederived
        if run_pipelines:
            if checker:
                verdict = run_sufficiency(q, run_cfg).verdict
                expected = expected and verdict == "PASS"
            else:
                verdict = run_falsification(q, run_cfg).verdict
                expected = expected and verdict == "DETECTED"
        rows.append(CorpusRow(i, format_poly(q), checker, rederived, route, verdict, expected))
    return rows
