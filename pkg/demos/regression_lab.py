# Does the client dummy recover a planted effect?
#
# Villages are drawn from the game equilibrium, peer ties are added, and
# participation is a linear probability with a true client effect of 0.15.

import numpy as np

from clientlab.regression import build_model_suite, ols_cluster_fit, regression_sample, run_suite, suite_table
from clientlab.survey import Effects, client_effect_monte_carlo, simulate_survey

data = simulate_survey(effects=Effects(client=0.15), villages=36, households=100, seed=1)
print(data.frame[["client", "concentration_raw", "degree_reciprocal", "participation", "days_worked"]].describe().round(2))

spec = next(s for s in build_model_suite(("participation",), ("fe",)) if s.model == "5")
fit = ols_cluster_fit(regression_sample(data, "participation"), spec)
print("client:", round(fit.coef("client"), 3), "se:", round(fit.se("client"), 3), "N:", fit.nobs, "G:", fit.n_clusters)

# all nine models, both variants
table = suite_table(run_suite(data))
print(table[["outcome", "model", "variant", "N"]].head(6))

# a short Monte Carlo; the acceptance suite runs 200 seeds
draws = client_effect_monte_carlo(range(20))
est = np.array([d.estimate for d in draws[0.15]])
print("mean estimate", est.mean().round(3), "sd", est.std().round(3))
print("null rejections", sum(d.pvalue < 0.05 for d in draws[0.0]), "of 20")
