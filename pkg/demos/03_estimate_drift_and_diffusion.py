# %% [markdown]
# # Estimating the drifts and the diffusion coefficient
#
# Drift of class `i`: least squares of the scaled increments
# `n (X_{k+1} - X_k)` on the spline basis, using only paths with label `i`,
# under a bound on the coefficient vector, then truncation.
# Squared diffusion: the same with `n (X_{k+1} - X_k)^2` over all paths,
# clamped to a positive interval. The number of intervals `K` is picked by a
# penalized contrast.

# %%
import math

import numpy as np

from sdeclass.estimate import EstimatorConfig, fit_all
from sdeclass.models import make_cosine_model
from sdeclass.regress import empirical_norm_sq
from sdeclass.simulate import sample_dataset

model = make_cosine_model(4.0)
ds = sample_dataset(model, N=1000, n=100, refinement=10, seed=3)
fit = fit_all(ds, EstimatorConfig())

print("weights", np.round(fit.weights, 3))
print("selected K per class", fit.k_drift, "for sigma^2", fit.k_sigma)
print("A =", round(fit.a_drift[0], 3), "= log N =", round(math.log(ds.N), 3))

# %% [markdown]
# Compare estimate and truth on a few points inside the bulk of the data.

# %%
x = np.linspace(-1, 1, 5)
for label in (1, 2, 3):
    print(f"b{label} true", np.round(model.drift(label, x), 2))
    print(f"b{label} est ", np.round(fit.drifts[label - 1](x), 2))
print("sigma^2 true", np.round(model.sigma(x) ** 2, 3))
print("sigma^2 est ", np.round(fit.sigma_sq_at(x), 3))

# %% [markdown]
# Empirical squared error of the class-2 drift as the sample grows.

# %%
for N in (100, 400, 1600):
    d = sample_dataset(model, N, 100, 10, seed=N)
    f = fit_all(d).drifts[1]
    err = empirical_norm_sq(d, lambda v: f(v) - model.drift(2, v), label=2)
    print(N, round(err, 4))
