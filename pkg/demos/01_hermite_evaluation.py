"""
Evaluating Hermite functions without overflow
=============================================

The three-term recurrence for the orthonormal Hermite functions h_n is
numerically benign, but its values are not: past the turning point
x ~ sqrt(2n) they fall below the smallest double long before n gets
interesting.  The library therefore hands back (sign, log magnitude)
pairs, and this script walks through what that buys.
"""

import math

import numpy as np

from hermite_decay import hermite_batch, hermite_exact, hermite_values

# ---------------------------------------------------------------
# 1. A single value.  h_40(12) is around 1e-12: still fine as a
#    double, and to_float() round-trips it.
v = hermite_exact(40, 12.0)
print(f"h_40(12)  sign={v.sign:+d}  log|h|={v.logmag:.6f}  value={v.to_float():.6e}")

# 2. The same order far past the turning point.  The value is ~e^-1200,
#    hopeless as a double, but the log representation does not blink.
v = hermite_exact(40, 60.0)
print(f"h_40(60)  sign={v.sign:+d}  log|h|={v.logmag:.3f}  (double would underflow)")

# 3. The classical uniform bound: |h_n(x)| <= pi^(-1/4) everywhere.
#    Probe it with a batch of randomized orders and points.
rng = np.random.default_rng(7)
orders = rng.integers(0, 2000, size=4000)
xs = rng.uniform(-80.0, 80.0, size=4000)
signs, logmags = hermite_batch(orders, xs)
print(f"\nrandomized sup of |h_n(x)|: {math.exp(logmags.max()):.10f}")
print(f"pi^(-1/4)                 = {math.pi ** -0.25:.10f}")

# 4. Where the sup is attained: always at small n, near the turning
#    point.  The largest magnitudes in the batch tell the story.
top = np.argsort(logmags)[-3:][::-1]
for i in top:
    print(f"  n={orders[i]:4d}  x={xs[i]:+8.3f}  |h|={math.exp(logmags[i]):.6f}")

# 5. For plotting-style work dense matrices are more convenient;
#    hermite_values flushes underflow to zero instead of refusing.
grid = np.linspace(-6.0, 6.0, 7)
table = hermite_values(4, grid)
print("\nh_0..h_4 on a coarse grid (rows are orders):")
for n, row in enumerate(table):
    print(f"  n={n}: " + "  ".join(f"{c:+.4f}" for c in row))
