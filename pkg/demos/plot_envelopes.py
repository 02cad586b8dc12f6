"""
Inf- and sup-convolution of a kinked function
=============================================

The inf-convolution rounds a convex corner from below, the
sup-convolution lifts it from above, and the two bracket the original.
"""

import numpy as np

from c11reg import GridSpec, generate, inf_convolve, sup_convolve, inf_convolve_bruteforce

spec = GridSpec.from_bounds(-4.0, 4.0, 0.01)
x = spec.axis(0)
u = generate("abs", [1.0], spec)

# t sets the width of the quadratic kernel |y - x|^2 / t
t = 1.0
lo = inf_convolve(u, t)
hi = sup_convolve(u, t)

# below |x| = t/2 the lower envelope is the parabola x^2/t, outside it is |x| - t/4
for p in (0.0, 0.25, 2.0):
    i = np.argmin(np.abs(x - p))
    print(f"x={p:4}: u={u.values[i]:.4f}  T_t u={lo.values[i]:.4f}  sup={hi.values[i]:.4f}")

# the ordering lo <= u <= hi holds at every node
print("ordered:", bool((lo.values <= u.values).all() and (u.values <= hi.values).all()))

# the fast sweep agrees with the quadratic-cost scan
small = generate("random-between", [-1, 1], GridSpec.from_bounds(-1, 1, 0.01), seed=0)
gap = np.abs(inf_convolve(small, 0.1).values - inf_convolve_bruteforce(small, 0.1).values).max()
print("fast vs brute force:", gap)
