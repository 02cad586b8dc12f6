"""
A C^{1,1} function between two bounds
=====================================

Given a semiconcave upper bound ``u`` and a semiconvex lower bound
``v <= u``, regularizing anything between them with ``t`` no larger than
both constants never leaves the band.
"""

import numpy as np

from c11reg import GridSpec, combine, generate, ilmanen_sandwich, bernard_r, semiconcavity_constant

spec = GridSpec.from_bounds(-2.0, 2.0, 0.01)

# a minimum of parabolas is 1-semiconcave, a maximum is 1-semiconvex
u = generate("min-of-parabolas", [1.0, 4], spec, seed=1)
v = generate("max-of-parabolas", [1.0, 4], spec, seed=2)
v = combine("subtract", v, float((v.values - u.values).max()) + 0.2)
print("k(u) =", semiconcavity_constant(u), " k(-v) =", semiconcavity_constant(-v))

res = ilmanen_sandwich(u, v)
print("t used:", res.t_used, " sandwich defect:", res.sandwich_defect)

# any f in the band works; here a random one, as rough as it gets
rng = np.random.default_rng(0)
lam = rng.uniform(0, 1, spec.shape)
f = combine("add", v, combine("multiply", combine("subtract", u, v), u.with_values(lam)))
for t in (0.25, 0.5, 1.0):
    w = bernard_r(f, t).values
    print(f"t={t}: max(w - u)={np.max(w - u.values):.2e}  max(v - w)={np.max(v.values - w):.2e}")
