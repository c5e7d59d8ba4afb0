"""
Uncertainty and descriptive tables
==================================

Two reporting tools that sit downstream of every experiment: a
user-level bootstrap for "how spread out are mean scores, really?", and
the descriptive table suite the report CLI renders from any ratings
file.
"""
import numpy as np

from ratelab.env_model import EnvConfig, ThresholdSpec
from ratelab.rating_analytics import (
    Dataset,
    descriptive_suite,
    trace_to_records,
    user_mean_scores,
)
from ratelab.sim_loop import SimConfig, run_simulation
from ratelab.stats import user_bootstrap_variance

# ----------------------------------------------------------------------
# 1. Simulate two arms of an experiment and pool the records.
records = []
for treatment, (t1, t2) in (("a", (0.4028, 0.8845)), ("c", (0.4240, 0.8270))):
    cfg = SimConfig(
        env=EnvConfig(num_users=100, num_items=600, latent_dim=8,
                      noise_sigma=0.5, seed=19),
        thresholds=ThresholdSpec(mode="quantile", t1=t1, t2=t2),
        recommender="random", n_iter=120, rating_frequency=0.3,
        ratio_init_ratings=0.02, mc_samples=100_000)
    records += trace_to_records(run_simulation(cfg).trace, treatment=treatment,
                                recommender_class="random")
ds = Dataset(records)

# ----------------------------------------------------------------------
# 2. Variance of per-user mean scores, with a percentile-bootstrap CI.
#    Resampling happens at the user level: a resample redraws users
#    (with replacement) and recomputes the variance of their means.
means = user_mean_scores(ds)
boot = user_bootstrap_variance(means, n_resamples=2000, level=0.95, seed=0)
print(f"user-mean variance {boot.point:.4f}  "
      f"95% CI [{boot.low:.4f}, {boot.high:.4f}]  "
      f"(+/- {boot.half_width:.4f})")

# ----------------------------------------------------------------------
# 3. The descriptive suite bundles the standard tables; analyses whose
#    fields are missing (no period column here) are reported as skipped
#    rather than failing the run.
out = descriptive_suite(ds, histogram_bins=10)
print("\ntables:", ", ".join(sorted(out["tables"])))
for name, reason in sorted(out["skipped"].items()):
    print(f"skipped {name}: {reason}")

# ----------------------------------------------------------------------
# 4. Option fractions per arm, computed per-user first so heavy raters
#    cannot drown out light ones.
print("\nrating fractions by arm")
for row in out["tables"]["rating_fractions"]:
    print(f"  {row['group']}  option {row['option']}  fraction {row['fraction']:.4f}")

# ----------------------------------------------------------------------
# 5. The user-mean histogram drives the spread-of-scores figure; here
#    are its most populated bins.
hist = sorted(out["tables"]["user_mean_histogram"],
              key=lambda r: -r["count"])[:5]
for row in hist:
    print(f"  [{row['bin_left']:.2f}, {row['bin_right']:.2f})  "
          f"group {row['group']}  count {row['count']}")
