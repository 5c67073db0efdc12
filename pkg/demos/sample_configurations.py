"""
Drawing Ginibre and Poisson source layouts
==========================================

Repulsion in the Ginibre process shows up as fewer close pairs and
fewer empty discs than in a Poisson layout of the same density.
"""

import numpy as np

from ambientrf import SpatialModel, sample_ginibre_dpp, sample_ppp
from ambientrf.analytic import hole_probability

rho, R = 0.3, 10.0

# one exact (HKPV) draw of each process
dpp = sample_ginibre_dpp(rho, R, rng_seed=7)
ppp = sample_ppp(rho, R, rng_seed=7)
print(f"expected count {rho * np.pi * R**2:.2f}: ginibre {len(dpp)}, poisson {len(ppp)}")


def nearest_neighbour(points):
    d = np.hypot(*(points[:, None, :] - points[None, :, :]).transpose(2, 0, 1))
    np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


# repulsion: the Ginibre nearest-neighbour distances are larger on average
print(f"mean nearest-neighbour distance: ginibre {nearest_neighbour(dpp.points).mean():.3f}, "
      f"poisson {nearest_neighbour(ppp.points).mean():.3f}")

# and an empty disc of radius 1.5 around the origin is rarer
for model in (SpatialModel.ginibre(rho), SpatialModel.ginibre(rho, R, 2), SpatialModel.ppp(rho)):
    print(f"P(no source within 1.5 m) {model.label():>13}: {hole_probability(1.5, model).value:.5f}")

# configurations serialise to CSV and back
print(dpp.to_csv().splitlines()[0])
