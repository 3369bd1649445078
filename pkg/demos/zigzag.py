"""Bootstrap zig-zag barcode of two well separated blobs.

Below the gap between the blobs every sample has two clusters and the
barcode has two full-length bars; above the gap there is only one.
"""

import numpy as np

from funclust import from_points
from funclust.zigzag import bootstrap_zigzag, interval_decomposition, linearize

rng = np.random.default_rng(0)
pts = np.vstack([rng.normal(0, 0.3, (25, 2)), rng.normal(0, 0.3, (25, 2)) + [10.0, 0.0]])
X = from_points(pts)
for eps in (2.0, 12.0):
    V = linearize(bootstrap_zigzag(X, n=20, N=5, eps=eps, seed=1))
    print(f"eps = {eps:4g}: dims {V.dims}, bars {list(interval_decomposition(V))}")
