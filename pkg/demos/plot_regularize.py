"""
Symmetric C^{1,1} regularization
================================

``bernard_r(f, t)`` smooths both kinds of corners at once.  The result has
second differences bounded by ``2 h^2 / t`` on both sides and stays close
to ``f`` when ``t`` is small.
"""

import numpy as np

from c11reg import GridFunction, GridSpec, bernard_r, c11_report, emit_plot_data

h = 0.005
spec = GridSpec((-np.pi,), (h,), (int(2 * np.pi / h) + 1,))
x = spec.axis(0)

# |sin 3x| has convex kinks at its zeros and smooth concave humps
f = GridFunction(spec, np.abs(np.sin(3 * x)))

for t in (0.1, 0.01, 0.001):
    w = bernard_r(f, t)
    rep = c11_report(w, t)
    # skip a band of width sqrt(t * osc) at each end, where the box edge is felt
    band = int(np.ceil(np.sqrt(t) / h))
    err = np.abs(w.values - f.values)[band:-band].max()
    print(f"t={t:<6} max|R_t f - f|={err:.2e}  (L^2 t = {9 * t:.3f})  C11 at t: {rep.c11_at_t}")

# At t = 0.001 the sampled kinks already satisfy the 2 h^2 / t bound on this
# grid, so the operator leaves f untouched.

# write the t=0.1 curve for any plotting tool
emit_plot_data(bernard_r(f, 0.1), "regularized_abs_sin3x.csv")
