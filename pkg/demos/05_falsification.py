"""
What breaks when the conditions fail
====================================

For an inadmissible q the target exp(q) phi phi is still computable, so we
can watch which property of a characteristic function it loses.  Every
signal is compared with the same detector run on q = 0.
"""

from qchar import parse_poly, run_falsification
from qchar.config import PipelineConfig

cfg = PipelineConfig(grid_count=256)
for text in ["t1*t2^2", "i*t1*t2", "t1^2", "t1^3", "i*t1 + t1*t2", "0.01i*t1*t2"]:
    rep = run_falsification(parse_poly(text, 2), cfg)
    print(f"\n{text}  ->  {rep.verdict} at eps={rep.epsilon}")
    for f in rep.findings:
        print(f"   condition ({f['condition']}) {f['kind']}: {f['detector']} = {f['signal']:.3g}"
              f"  threshold {f['threshold']:.0e}, null floor {f['null_floor']:.1e}")

# %% The weak case needed a wider box; the attempts are recorded
print(rep.attempts)
