"""
A lower bound on the expected rate
==================================

Any rate requirement M is met with probability at least one minus the
worst-case transmission outage bound, so M times that probability is a
lower bound on the expected rate.  Maximising over M gives the best one.
"""

from ambientrf import Architecture, PhysicalParams, SpatialModel, rate_lower_bound

params = PhysicalParams()
for tau in (None, 0.3, 0.6, 0.9):
    arch = Architecture.separated() if tau is None else Architecture.time_switching(tau)
    for model in (SpatialModel.ginibre(0.1), SpatialModel.ppp(0.1)):
        res = rate_lower_bound(params, arch, model)
        name = "separated" if tau is None else f"tau={tau}"
        print(f"{name:10} {model.label():>13}: {res.value:9.1f} bit/s at M = {res.argmax_M:9.1f}")
