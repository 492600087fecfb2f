# %% [markdown]
# # B-spline bases on a symmetric interval
#
# The estimators expand every unknown function in a clamped B-spline basis on
# `[-A, A]` with `K` equal intervals and degree `M`. The basis has `K + M`
# functions which are nonnegative and sum to one inside the interval.

# %%
import numpy as np

from sdeclass.spline import (
    SplineBasis,
    SplineFn,
    Threshold,
    design_matrix,
    interpolate_function,
)

basis = SplineBasis.build(A=2.0, K=4, M=3)
print("dimension", basis.dim)
print("knots", basis.knots.knots)

# %% [markdown]
# Each row of the design matrix holds the basis values at one point. Only
# `M + 1` entries per row are nonzero.

# %%
x = np.linspace(-2, 2, 9)
B = design_matrix(basis, x)
np.set_printoptions(precision=3, suppress=True)
print(B)
print("row sums", B.sum(axis=1))

# %% [markdown]
# Outside `[-A, A]` every basis function vanishes, so a spline is zero there.

# %%
print(design_matrix(basis, [-2.5, 3.0]).sum(axis=1))

# %% [markdown]
# A spline with a truncation: coefficients are free, the thresholded version
# never leaves `[-T, T]`.

# %%
rng = np.random.default_rng(0)
f = SplineFn(basis, rng.normal(0, 3, basis.dim), Threshold(2.0))
grid = np.linspace(-2, 2, 5)
print("raw      ", f.raw(grid))
print("truncated", f(grid))

# %% [markdown]
# Quasi-interpolating a smooth function from one sample per basis function.
# Sampling at the left end of each support only guarantees an error of order
# the support width; Greville sites (knot averages) do much better.

# %%
probe = np.linspace(-np.pi, np.pi, 2001)
for K in (2, 4, 8, 16, 32):
    b = SplineBasis.build(np.pi, K, 3)
    errs = [np.max(np.abs(interpolate_function(np.sin, b, rule)(probe) - np.sin(probe)))
            for rule in ("left", "greville")]
    print(f"K={K:2d}  left {errs[0]:.4f}  greville {errs[1]:.5f}")
