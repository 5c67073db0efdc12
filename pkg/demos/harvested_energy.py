"""
Average harvested power versus source density
=============================================

The exact mean, its small-epsilon approximation and a Monte Carlo
estimate, for Poisson sources at several densities.
"""

from ambientrf import Architecture, PhysicalParams, SpatialModel, expected_harvest
from ambientrf.analytic import variance_harvest
from ambientrf.montecarlo import estimate_harvest_moments

params = PhysicalParams()          # epsilon = 0.01 m, R = 10 m in the models below
arch = Architecture.separated()
n = 50_000

print(f"{'rho':>6} {'exact (W)':>11} {'approx (W)':>11} {'gap':>6} {'MC mean (W)':>12} {'stderr':>9}")
for rho in (0.01, 0.05, 0.1, 0.5, 1.0):
    model = SpatialModel.ppp(rho)
    exact, approx = expected_harvest(params, arch, model)
    est, _ = estimate_harvest_moments(params, arch, model, n, master_seed=1)
    print(f"{rho:6.2f} {exact:11.4e} {approx:11.4e} {(approx - exact) / approx:6.3f} "
          f"{est.mean:12.4e} {est.stderr:9.2e}")

# the mean does not depend on repulsion, the variance does
for model in (SpatialModel.ginibre(0.1), SpatialModel.ginibre(0.1, 10.0, 2), SpatialModel.ppp(0.1)):
    print(f"variance {model.label():>13}: {variance_harvest(params, arch, model):.5e} W^2")
