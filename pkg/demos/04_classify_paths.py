# %% [markdown]
# # Plug-in classification
#
# For a new path the classifier computes, per class, the discretized
# log-likelihood ratio
# `F_i = sum_k (b_i / sigma^2)(X_k) dX_k - (1/2n) (b_i^2 / sigma^2)(X_k)`
# with the estimated functions, turns it into posterior probabilities with a
# softmax weighted by the class frequencies, and returns the argmax.

# %%
import numpy as np

from sdeclass.classify import BayesClassifier, PlugInClassifier, empirical_risk, excess_risk
from sdeclass.estimate import fit_all
from sdeclass.models import make_cosine_model
from sdeclass.simulate import sample_dataset

model = make_cosine_model(2.5)
train = sample_dataset(model, 1000, 100, 10, seed=10)
test = sample_dataset(model, 2000, 100, 10, seed=11)

plugin = PlugInClassifier.from_fit(fit_all(train))
bayes = BayesClassifier(model)

# %% [markdown]
# Posterior probabilities of the first three test paths.

# %%
np.set_printoptions(precision=3, suppress=True)
print(plugin.posterior(test.paths[:3]))
print("true labels", test.labels[:3], "predicted", plugin.predict(test.paths[:3]))

# %% [markdown]
# Misclassification rates on the test set. The Bayes classifier uses the true
# drifts and diffusion and is the benchmark.

# %%
print("plug-in risk", empirical_risk(plugin, test))
print("Bayes risk  ", empirical_risk(bayes, test))
print("excess risk ", excess_risk(plugin, bayes, test))
