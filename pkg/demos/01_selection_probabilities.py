"""Where do the optimality-based selection probabilities put their mass?

Builds a synthetic logistic dataset, fits a pilot on a small random
subsample, then compares the A-optimal (mMSE) and L-optimal (mVc)
probabilities with uniform sampling.  Rows that are poorly explained by
the pilot fit and far from the center of the design get the most mass.
"""

import numpy as np

from glmsub import (
    Logistic,
    WeightedSample,
    draw_with_replacement,
    fit_weighted_mle,
    initial_probabilities,
    phi_single,
)

rng = np.random.default_rng(1)
N = 20_000
family = Logistic()

x = rng.multivariate_normal([0, 0], 1.5 * np.eye(2), size=N)
design = np.column_stack([np.ones(N), x])
theta_true = np.array([-1.0, 0.5, 0.1])
y = rng.binomial(1, family.mean(design @ theta_true)).astype(float)
print(f"dataset: N={N}, P(y=1)={y.mean():.3f}")

# Stage 1: case-control pilot.
init = initial_probabilities(family, y)
idx = draw_with_replacement(init, 200, rng)
pilot = fit_weighted_mle(
    family, WeightedSample(design[idx], y[idx], init.probs[idx])
)
print(f"pilot estimate from 200 rows: {np.round(pilot.theta, 3)}")

for crit in ("mMSE", "mVc"):
    pv = phi_single(crit, family, pilot.theta, design, y)
    lift = pv.probs * N  # 1.0 means "same as uniform"
    top = np.argsort(pv.probs)[-3:][::-1]
    print(f"\n{crit}: max/min lift over uniform = {lift.max():.1f} / {lift.min():.3f}")
    for i in top:
        mu = family.mean(design[i] @ pilot.theta)
        print(
            f"  row {i}: x=({x[i,0]:+.2f},{x[i,1]:+.2f}) y={int(y[i])} "
            f"fitted mean={mu:.3f} -> {lift[i]:.1f}x uniform"
        )
