"""
Growth laws in simulated networks
=================================

Grow preferential-attachment networks under different arrival schedules
and look at the shape of the total-KQI curve.
"""

from kqi import ArrivalSchedule, BaConfig, analytic_predictions, generate_ba, total_kqi_series
from kqi.analysis import fit_linear, quadratic_coefficient

m, steps = 3, 20

# Standard growth: the first step holds 1% of the final 10^5 papers.
standard = ArrivalSchedule.standard_sized(m, 100_000, steps, initial=1000)
ts, totals = total_kqi_series(generate_ba(BaConfig(m, standard, seed=1, steps=steps)), steps)
fit = fit_linear(ts, totals)
print(f"standard: slope={fit.slope:.3f} r2={fit.r2:.4f}")

for name, schedule, T in [
    ("t^(m+2)", ArrivalSchedule.power(1.0, m + 2), 10),
    ("exponential", ArrivalSchedule.exponential(50.0, 0.5), 12),
    ("constant", ArrivalSchedule.constant(5000), 20),
]:
    ts, totals = total_kqi_series(generate_ba(BaConfig(m, schedule, seed=1, steps=T)), T)
    print(f"{name}: quadratic coefficient {quadratic_coefficient(ts, totals):+.4f}")

# Continuous-model estimates for a node whose network has grown 1024-fold.
p = analytic_predictions(10, 1024.0, w_birth=10_000.0)
print(f"degree {p.degree:.2f}, volume {p.volume:.1f}, kqi ~ {p.kqi_approx:.4f}")
