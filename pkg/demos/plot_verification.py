"""
Running the certification suites
================================

Each suite checks one inequality or monotonicity statement over a parameter
grid and returns one record per parameter combination.  emit_report gives
the newline-delimited report also written by ``besselbound verify``.
"""

from besselbound import GridSpec, emit_report, run_suite

grid = GridSpec(mu_list=(0.0, 1.0), q_list=(0.0,), gamma_list=(0.5,), x_count=30)
records = run_suite("main_3_2", grid)
print(emit_report(records[:3]))
print(all(r.passed for r in records), min(r.worst_margin for r in records))
