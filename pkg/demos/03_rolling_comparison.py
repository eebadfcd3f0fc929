"""Rolling-origin comparison of the four forecasters on long-memory data.

A fixed 96-observation window rolls over each series; every method is
refit at each origin and scored out of sample over horizons 1..24. The
pooled table at the end mirrors what the `crossval` command emits.

This is a scaled-down run (3 series, stride 25) so it finishes in about a
minute; lengthen the series or lower the stride for tighter estimates.
"""

import numpy as np

from lrdforecast import (
    CvConfig,
    GenSpec,
    aggregate_reports,
    generate,
    rolling_cv,
)

config = CvConfig(window=96, max_horizon=24, step=25)

reports = []
for seed in range(3):
    series = generate(GenSpec(kind="arfima", n=800, seed=seed, d=0.35, offset=80.0))
    reports.append(rolling_cv(series, config))
    print(f"series {series.label}: {reports[-1].per_method['arfima'].count} origins")

pooled = aggregate_reports(reports)

print("\npooled MAPE (%) by horizon:")
print(f"{'h':>3s} " + "".join(f"{m:>9s}" for m in config.methods))
for i in (0, 3, 7, 11, 17, 23):
    row = "".join(f"{pooled.per_method[m].mape[i]:9.3f}" for m in config.methods)
    print(f"{i + 1:3d} {row}")

print("\nmean MAPE over all horizons:")
for m in config.methods:
    print(f"  {m:7s} {pooled.per_method[m].mape.mean():7.3f}%")

print("\nimprovement of the fractional model over each alternative (% MAPE reduction):")
for base in ("naive", "mean", "arima"):
    imp = pooled.improvements[(base, "arfima")]
    print(f"  vs {base:6s} mean {imp.mean:6.2f}%   at h=1 {imp.per_horizon[0]:6.2f}%   "
          f"at h={config.max_horizon} {imp.per_horizon[-1]:6.2f}%   best {imp.max:6.2f}%")

print("""
The signature of long memory: the fractional model's edge over the plain
ARIMA grows with the forecast horizon, because only it carries the slow
correlation decay far ahead. At one step every reasonable method is
nearly tied; by the end of the horizon the gap is wide.
""")
