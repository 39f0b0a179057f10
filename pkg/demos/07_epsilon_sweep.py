"""
How large can epsilon actually be?
==================================

The certified bound on epsilon is only sufficient.  Here the spectral inverse
is evaluated directly for growing epsilon and compared with p(x1) p(x2) on the
bulk of the grid (far tails hold only rounding noise).  The ratio stays
positive well past the certified value before it finally turns negative.
"""

import numpy as np

from qchar import TargetCF, cf_property_check, default_grid, invert_cf, parse_poly, scale
from qchar.config import PipelineConfig
from qchar.verify import select_epsilon

cfg = PipelineConfig()
for text in ["t1*t2", "-t1^2*t2^2"]:
    q = parse_poly(text, 2)
    _, eps_max, _ = select_epsilon(q, cfg)
    print(f"\n{text}: certified eps_max = {eps_max:.4f}")
    for eps in np.geomspace(eps_max, 0.95, 9):
        p = scale(cfg.base(), eps)
        T = TargetCF(q, p)
        grid = default_grid(p, 2, count=256)
        r = invert_cf(T, grid)
        prod = np.multiply.outer(p.pdf(grid.points(0)), p.pdf(grid.points(1)))
        bulk = prod >= 1e-6 * prod.max()
        ratio = np.min(r.values.real[bulk] / prod[bulk])
        props = cf_property_check(T)
        print(f"  eps={eps:.4f}  min r/(p x p) = {ratio:+.4f}  |Phi|<=1: {props.checks['bounded']}  "
              f"Gram PSD: {props.checks['gram_psd']}")
