"""Fitting the four forecasters and comparing their prediction intervals.

All models are fit on the log scale (the standard choice for strictly
positive response times) and forecasts are mapped back, so the intervals
are asymmetric and always positive.
"""

from lrdforecast import (
    GenSpec,
    TimeSeries,
    TransformSpec,
    fit_arfima,
    fit_arima,
    fit_mean,
    fit_naive,
    forecast,
    generate,
    transform,
)

H = 24  # forecast horizon

raw = generate(GenSpec(kind="arfima", n=500, seed=3, d=0.35, offset=80.0))
train = transform(TimeSeries(raw.values[:300]), TransformSpec(lmbda=0.0))

models = {
    "naive": fit_naive(train),
    "mean": fit_mean(train),
    "arima": fit_arima(train),
    "arfima": fit_arfima(train),
}

print("fitted models (on the log scale):")
for name, model in models.items():
    s = model.spec
    print(f"  {name:7s} (p={s.p}, d={s.d:.3g}, q={s.q})  sigma2={model.sigma2:.3e}  "
          f"aicc={model.aicc:.2f}")

forecasts = {name: forecast(m, H, level=0.95) for name, m in models.items()}

print(f"\n{'h':>3s}", end="")
for name in models:
    print(f"  {name + ' (lo  pt  hi)':>26s}", end="")
print()
for i in range(0, H, 4):
    print(f"{i + 1:3d}", end="")
    for name in models:
        fc = forecasts[name]
        print(f"   {fc.lower[i]:7.1f} {fc.point[i]:7.1f} {fc.upper[i]:7.1f}", end="")
    print()

print("\ninterval width by horizon (upper - lower):")
for name, fc in forecasts.items():
    widths = fc.upper - fc.lower
    print(f"  {name:7s} h=1: {widths[0]:7.2f}   h=8: {widths[7]:7.2f}   "
          f"h=24: {widths[23]:7.2f}")

print("""
The last-value model's interval widens like sqrt(h) and quickly becomes
useless; the window-mean interval never narrows or widens at all. The
autoregressive models sit in between: their widths grow with horizon but
stay bounded by the series' own variability, and the fractional model
keeps the tightest long-horizon band because it carries the slowly
decaying correlation into the forecast.
""")
