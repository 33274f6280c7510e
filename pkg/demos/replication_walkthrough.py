# A full pass over one synthetic dataset: integration order of the logged
# series, a Tinbergen Cobb-Douglas fit with AR(1) errors, the residual
# cointegration check and the economic reading of the coefficients.

import numpy as np

from prodfn import ReplicationParams, generate_replication_dataset
from prodfn.analysis import elasticities, engle_granger, regularity_check, returns_to_scale, technical_change
from prodfn.diagnostics import run_diagnostics
from prodfn.errors import Inconclusive
from prodfn.estimation import fit_model
from prodfn.forms import ModelSpec
from prodfn.series import AnnualSeries
from prodfn.unitroot import integration_order

d = generate_replication_dataset(ReplicationParams(), seed=3)
print(f"{len(d)} years, {d.start_year}-{d.end_year}")

# 31 points is not much to go on; a short series can fail to settle
for name in ("Q", "L", "K"):
    s = AnnualSeries(f"ln{name}", d.start_year, np.log(d[name]))
    try:
        print(f"ln{name}: I({int(integration_order(s))})")
    except Inconclusive as exc:
        print(f"ln{name}: {exc}")

spec = ModelSpec("cd_tinbergen", ar_error_order=1)
design, fit = fit_model(d, spec)
for name in fit.names:
    print(f"  {name:6s} {fit.coefficients[name]:8.4f}  (t = {fit.t_stats[name]:6.2f})")
print(f"  rho    {fit.rho:8.4f}   r2 {fit.r2:.4f}   DW {fit.dw:.2f}")

diag = run_diagnostics(fit, design)
print("BG p =", round(diag.bg.pvalue, 3), " JB p =", round(diag.jb.pvalue, 3))

eg = engle_granger(fit)
print(f"residual ADF {eg.adf.statistic:.3f} vs 5% value {eg.adf.cv5:.3f}: {eg.decision}")

# with constant elasticities the returns to scale do not depend on where we look
prof = elasticities(fit, "cd_tinbergen", d)
value, label = returns_to_scale(prof)
print(f"capital {prof.eps_K:.3f}, labour {prof.eps_L:.3f}, returns to scale {value:.3f} ({label})")
tc = technical_change(fit)
print(f"technical change {tc.gamma:.3f} per year, {tc.label}")
print("regular at every observation:", regularity_check(fit, "cd_tinbergen", d).share == 1.0)
