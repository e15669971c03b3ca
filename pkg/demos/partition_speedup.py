"""Query complexity of partition-function estimation.

Measures how many oracle queries the classical Monte Carlo estimator and the
simulated amplitude estimator need to hit a target precision in two thirds of
trials, across three decades of precision, and fits the power-law exponents.
The classical count grows roughly with 1/eps^2 while the amplitude estimator
grows with 1/eps.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from fpflow import (EstimationMethod, Potential, fit_power_law, make_grid,
                    queries_to_precision)

grid = make_grid(-3.0, 3.0, 9)
potential = Potential.double_well_sine()
eps_grid = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]

points = {m: [] for m in EstimationMethod}
for eps in eps_grid:
    for method in EstimationMethod:
        pt = queries_to_precision(method, potential, 0.3, grid, eps, trials=50)
        points[method].append(pt)
        print(f"{method.value:13s} eps={eps:7.0e} queries={pt.queries:>10,} "
              f"median error={pt.achieved_error:.2e} success={pt.success_rate:.2f}")

inv_eps = [1.0 / e for e in eps_grid]
for method in EstimationMethod:
    slope = fit_power_law(inv_eps, [p.queries for p in points[method]])
    print(f"{method.value}: fitted exponent of queries vs 1/eps = {slope:.3f}")

ratios = [c.queries / q.queries for c, q in
          zip(points[EstimationMethod.CLASSICAL_MC],
              points[EstimationMethod.SIMULATED_QAE])]
print("classical / estimator query ratio per precision:",
      [f"{r:.0f}x" for r in ratios])

fig, ax = plt.subplots(figsize=(5.5, 4))
for method, marker in ((EstimationMethod.CLASSICAL_MC, "o"),
                       (EstimationMethod.SIMULATED_QAE, "s")):
    ax.loglog(inv_eps, [p.queries for p in points[method]], marker + "-",
              label=method.value)
ax.fill_between(inv_eps, [p.queries for p in points[EstimationMethod.SIMULATED_QAE]],
                [p.queries for p in points[EstimationMethod.CLASSICAL_MC]],
                alpha=0.15)
ax.set_xlabel("1 / precision")
ax.set_ylabel("oracle queries")
ax.legend()
fig.tight_layout()
fig.savefig("partition_speedup.png", dpi=120)
print("wrote partition_speedup.png")
