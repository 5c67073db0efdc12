"""
Worst-case outage bounds
========================

A sensor powered only by its nearest source is in power outage exactly
when no source lies within the critical radius gamma.  The probability
of that hole is an upper bound on the true outage probability.
"""

import numpy as np

from ambientrf import Architecture, PhysicalParams, SpatialModel, critical_radius_power, power_outage_bound
from ambientrf.analytic import transmission_outage_bound
from ambientrf.montecarlo import estimate_outage

params = PhysicalParams()
arch = Architecture.separated()
print(f"critical radius gamma = {critical_radius_power(params, arch):.4f} m")

print(f"{'rho':>5} {'j=1':>8} {'j=2':>8} {'ppp':>8} {'MC j=1':>8} {'general':>8}")
for rho in np.round(np.arange(0.02, 0.11, 0.02), 3):
    models = [SpatialModel.ginibre(rho), SpatialModel.ginibre(rho, 10.0, 2), SpatialModel.ppp(rho)]
    bounds = [power_outage_bound(params, arch, m).value for m in models]
    worst = estimate_outage("power", "worst_case", params, arch, models[0], n=50_000)
    general = estimate_outage("power", "general", params, arch, models[0], n=50_000)
    print(f"{rho:5.2f} " + " ".join(f"{b:8.4f}" for b in bounds) + f" {worst.mean:8.4f} {general.mean:8.4f}")

# transmission outage to a sink 50 m away on a clean band, m = 3 kbit/s
for rho in (0.02, 0.1):
    res = transmission_outage_bound(params, arch, SpatialModel.ginibre(rho), 3000.0)
    print(f"transmission bound rho={rho}: {res.value:.4f} (gamma_m {res.critical_radius:.3f} m, N={res.truncation_N})")
