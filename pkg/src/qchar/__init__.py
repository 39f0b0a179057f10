"""Admissible polynomials in Q-independence and Q-identical distribution.

Decide whether a polynomial ``q`` can appear in ``phi(t) = exp(q(t)) prod_j phi_j(t_j)``,
synthesise a density realising it, and verify or falsify the result spectrally.
"""

from .basedensity import (
    BaseDensity,
    C3Estimate,
    ScaledDensity,
    cf_eval,
    density_deriv,
    density_eval,
    epsilon_max,
    estimate_C3,
    make_base,
    scale,
)
from .config import PipelineConfig, load_config
from .construct import Certificate, build_density, build_sn, default_grid, tail_bound
from .grid import Axis, GridSpec, SampledField
from .poly import (
    AdmissibilityReport,
    MultiPoly,
    check_q_identical,
    check_q_independence,
    conj_reflect,
    eval_poly,
    format_poly,
    parse_poly,
    poly_pow,
    poly_stats,
)
from .spectral import TargetCF, cf_property_check, forward_check, invert_cf, target_cf_eval
from .verify import run_corpus, run_falsification, run_sufficiency

__all__ = [
    "BaseDensity",
    "C3Estimate",
    "ScaledDensity",
    "cf_eval",
    "density_deriv",
    "density_eval",
    "epsilon_max",
    "estimate_C3",
    "make_base",
    "scale",
    "PipelineConfig",
    "load_config",
    "Certificate",
    "build_density",
    "build_sn",
    "default_grid",
    "tail_bound",
    "Axis",
    "GridSpec",
    "SampledField",
    "AdmissibilityReport",
    "MultiPoly",
    "check_q_identical",
    "check_q_independence",
    "conj_reflect",
    "eval_poly",
    "format_poly",
    "parse_poly",
    "poly_pow",
    "poly_stats",
    "TargetCF",
    "cf_property_check",
    "forward_check",
    "invert_cf",
    "target_cf_eval",
    "run_corpus",
    "run_falsification",
    "run_sufficiency",
]

__version__ = "0.1.0"
