"""
Manufactured-solution convergence
=================================

Drive the scheme with the source of u* = exp(-t) (2 + cos(pi x)) and
measure the weighted L2 error under refinement with dt proportional to h^2.
"""

from thinfilm.mms import mms_dt_study, mms_study

####################################################################
# Spatial order
# -------------

for row in mms_study():
    print(f"N={row.N:4d}  dt={row.dt:.2e}  error={row.error:.3e}  order={row.order:.3f}")

####################################################################
# Temporal order at fixed N
# -------------------------
# Backward Euler is first order.

diffs, orders = mms_dt_study()
print("successive differences:", ["%.2e" % d for d in diffs])
print("orders:", ["%.3f" % o for o in orders])
