"""
A strictly positive density with a compactly supported characteristic function
==============================================================================

f(x) is proportional to (sinc^8(x/2) + sinc^8((x - 1)/2)) / 2.  Each term has
zeros on a lattice, but the two lattices never meet, so f > 0.  Its
characteristic function is a B-spline times a phase, zero outside [-4, 4].
"""

import numpy as np

from qchar import cf_eval, density_deriv, density_eval, estimate_C3, make_base, scale
from qchar.construct import default_c3_grid

f = make_base()                  # power 8, shift 1
print(f.to_dict())

# %% Positive even where one component vanishes
x = 2 * np.pi * np.arange(-3, 4)
print("f(2 pi k):", density_eval(f, x))

# %% Characteristic function: 1 at the origin, nothing past the band limit
t = np.array([0.0, 1.0, 3.9, 4.0, 4.5])
print("phi:", np.round(cf_eval(f, t), 6))

# %% Derivatives come from the spectrum, no finite differences involved
for m in range(4):
    print(m, density_deriv(f, m, 0.3))

# %% How fast can derivatives grow relative to f?  C3 bounds |f^(m)| <= C3^m f
grid = default_c3_grid(f)
for M in (1, 4, 12, 24):
    c3 = estimate_C3(f, M, grid)
    print(f"M={M:2d}  C3={c3.value:8.3f}  worst at x={c3.argmax[0]:.3f}, m={c3.argmax[1]}")

# %% Scaling p(x) = eps * f(eps x) squeezes the spectrum into [-4 eps, 4 eps]
p = scale(f, 0.1)
print("band limit after scaling:", p.band_limit, " phi_p(0.5) =", p.cf(0.5))
