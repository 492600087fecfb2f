# %% [markdown]
# # Simulating labelled diffusion paths
#
# A dataset is a set of pairs `(label, path)`. The label is drawn from the
# class weights, then the path solves `dX = b_label(X) dt + sigma(X) dW` on
# `[0, 1]` from `X_0 = 0`, observed at `n + 1` equally spaced times.

# %%
import tempfile
from pathlib import Path

import numpy as np

from sdeclass.models import make_model
from sdeclass.simulate import read_dataset, sample_dataset, write_dataset

model = make_model("cosine:5/2")
print(model.model_id, "weights", model.weights)

# %% [markdown]
# The Euler scheme runs on a grid `refinement` times finer than the
# observation grid and keeps every `refinement`-th point.

# %%
ds = sample_dataset(model, N=500, n=100, refinement=10, seed=1)
print("paths", ds.paths.shape, "class counts", ds.class_counts())
for label in (1, 2, 3):
    end = ds.class_paths(label)[:, -1]
    print(f"class {label}: mean X_1 = {end.mean():+.3f}, sd = {end.std():.3f}")

# %% [markdown]
# Each record has its own random stream, so the first paths of a large
# dataset are the same as those of a smaller one with the same seed.

# %%
small = sample_dataset(model, N=5, n=100, refinement=10, seed=1)
print(np.array_equal(small.paths, ds.paths[:5]))

# %% [markdown]
# Datasets are stored as plain text with a one-line header.

# %%
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "paths.csv"
    write_dataset(small, path)
    print(path.read_text().splitlines()[0])
    print(read_dataset(path) == small)
