"""
Which polynomials can sit in the exponent?
==========================================

A polynomial q with q(0) = 0 is usable in

    phi(t1, t2) = exp(q(t1, t2)) * phi1(t1) * phi2(t2)

only when no monomial depends on a single variable and each coefficient is
real for even total degree, purely imaginary for odd total degree.
"""

import numpy as np

from qchar import check_q_identical, check_q_independence, conj_reflect, format_poly, parse_poly
from qchar.poly import random_sparse_poly

# %% A handful of hand-picked cases
for text in ["t1*t2", "i*t1^2*t2", "t1^2 + t1*t2", "i*t1*t2", "t1*t2^2", "-t1^2*t2^2"]:
    report = check_q_independence(parse_poly(text, 2))
    kinds = ", ".join(f"{v.kind.value}{v.exponent}" for v in report.violations) or "-"
    print(f"{text:>16}  admissible={report.verdict!s:5}  {kinds}")

# %% The parity rule is exactly invariance under t -> -t followed by conjugation
q = parse_poly("i*t1*t2", 2)
print(format_poly(q), "->", format_poly(conj_reflect(q)))

# %% With one variable only the parity rule remains
for text in ["i*t1", "t1", "-t1^2", "i*t1^3 - 0.5*t1^2"]:
    print(f"{text:>18}  {check_q_identical(parse_poly(text, 1)).verdict}")

# %% Random sparse polynomials: roughly how many pass?
rng = np.random.default_rng(7)
polys = [random_sparse_poly(rng) for _ in range(1000)]
share = np.mean([check_q_independence(p).verdict for p in polys])
print(f"admissible share in 1000 random draws: {share:.3f}")
