"""Stochastic outlier selection on a synthetic point cloud.

SOS assigns each 2-d point an outlier probability.  For every point a
Gaussian affinity over its squared distances to the others is calibrated
(by bisecting the variance) until the binding distribution's perplexity
matches a target h; the outlier probability of point i is then
Phi(i) = prod over j != i of (1 - b_ji), the chance that no other point
"binds" to it.

Two implementations exist on purpose: the engine's vectorized one and a
deliberately independent brute-force reference used by the validator.
They agree to ~1e-12.
"""

import numpy as np

from streambench.sos import SosParams, outlier_probabilities
from streambench.validator import sos_reference

rng = np.random.default_rng(7)

# a tight cluster, a loose cluster, and two isolated points
cluster_a = rng.normal(loc=(0, 0), scale=1.0, size=(40, 2))
cluster_b = rng.normal(loc=(60, 60), scale=5.0, size=(40, 2))
strays = np.array([(30.0, -40.0), (120.0, 10.0)])
points = np.vstack([cluster_a, cluster_b, strays])

params = SosParams(perplexity=15.0, tolerance=1e-12, max_iter=200)
phi = outlier_probabilities(points, params)

print(f"{len(points)} points, perplexity h = {params.perplexity}")
print(f"cluster A   Phi range: {phi[:40].min():.3f} .. {phi[:40].max():.3f}")
print(f"cluster B   Phi range: {phi[40:80].min():.3f} .. {phi[40:80].max():.3f}")
print(f"stray no.1  Phi = {phi[80]:.3f}")
print(f"stray no.2  Phi = {phi[81]:.3f}")
print(f"\npoints with Phi >= 0.5 (the engine's Q2 emission rule): "
      f"{sorted(np.flatnonzero(phi >= 0.5).tolist())}")

ref = sos_reference([tuple(p) for p in points], params.perplexity,
                    params.tolerance, params.max_iter)
print(f"max |vectorized - brute force| = "
      f"{float(np.max(np.abs(phi - np.array(ref)))):.2e}")

# perplexity controls how local "neighborhood" is
for h in (5.0, 15.0, 40.0):
    p = outlier_probabilities(points, SosParams(perplexity=h))
    print(f"h={h:>4}: stray Phi = {p[80]:.3f} / {p[81]:.3f}, "
          f"mean cluster Phi = {p[:80].mean():.3f}")
