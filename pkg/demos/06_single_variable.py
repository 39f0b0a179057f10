"""
One variable: exp(q) phi is again a characteristic function
===========================================================

With a single variable, q(t) = i c t shifts the density by c, q = -t^2/2
convolves it with a standard normal, and higher odd/even terms with the
right coefficient type give new densities close to p.
"""

import math

import numpy as np
from scipy.integrate import trapezoid

from qchar import parse_poly, run_sufficiency, scale
from qchar.config import PipelineConfig

cfg = PipelineConfig()

# %% Modulation is translation
rep = run_sufficiency(parse_poly("0.5i*t1", 1), cfg)
p = scale(cfg.base(), rep.epsilon)
x = rep.r_spectral.grid.points(0)
print("eps =", rep.epsilon, " sup|r - p(x - 0.5)| =", np.max(np.abs(rep.r_spectral.values - p.pdf(x - 0.5))))

# %% A Gaussian factor is a convolution
rep = run_sufficiency(parse_poly("-0.5*t1^2", 1), cfg)
p = scale(cfg.base(), rep.epsilon)
xs = rep.r_spectral.grid.points(0)[::512]
y = np.linspace(-12, 12, 4801)
conv = [trapezoid(p.pdf(xi - y) * np.exp(-0.5 * y**2), y) / math.sqrt(2 * math.pi) for xi in xs]
print("sup|r - p * N(0,1)| =", np.max(np.abs(rep.r_spectral.values[::512] - conv)))

# %% A mixed cubic
rep = run_sufficiency(parse_poly("i*t1^3 - t1^2", 1), cfg)
print(rep.verdict, rep.certificate["analytic_margin"], rep.certificate["min_value"])
