"""
Weighted interpolation inequalities
===================================

Check the half-interval parameter set of the weighted interpolation
inequality, evaluate the ratio on random splines and measure the
weighted embedding constant on random H^1_w fields.
"""

from dataclasses import replace

import numpy as np

from thinfilm.inequalities import (HALF_INTERVAL_PARAMS, embedding_ensemble, nirenberg_ratio,
                                   random_h1_fields, random_spline_family, validate_params)

####################################################################
# Parameter hypotheses
# --------------------

check = validate_params(HALF_INTERVAL_PARAMS)
print("reference set valid:", check.valid, "branches:", check.branches)
bad = validate_params(replace(HALF_INTERVAL_PARAMS, p=1.5))
print("p = 1.5 violates:", bad.violations)

####################################################################
# Ratio over a spline ensemble
# ----------------------------
# The ratio is homogeneous of degree zero, so scaling leaves it unchanged.

family = random_spline_family(20, seed=0)
ratios = np.array([nirenberg_ratio(tf) for tf in family])
scaled = np.array([nirenberg_ratio(tf.scaled(5.0)) for tf in family])
print(f"max ratio {ratios.max():.4f}, max relative change under 5x scaling "
      f"{np.max(np.abs(scaled / ratios - 1)):.1e}")

####################################################################
# Embedding constant under grid refinement
# ----------------------------------------

fields = random_h1_fields(20, seed=0)
for N in (129, 257):
    print(f"N={N}: max embedding ratio {embedding_ensemble(fields, N).max():.4f}")
