"""Seeded generators of synthetic series with known memory structure.

These are the ground-truth inputs for estimator and forecaster tests:
white noise, ARMA, fractionally integrated ARMA, exact fractional Gaussian
noise (circulant embedding), and random walks. All draws come from
numpy.random.Generator with the PCG64 bit generator seeded from the spec,
so identical specs produce identical series on every run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve, lfilter

from .errors import InvalidD, InvalidSpec, NonEmbeddableCovariance
from .models import _admissible, _arpoly, _fracint_weights, _mapoly
from .series import TimeSeries

WHITE_NOISE = "white_noise"
ARMA = "arma"
ARFIMA = "arfima"
FGN = "fgn"
RANDOM_WALK = "random_walk"
KINDS = (WHITE_NOISE, ARMA, ARFIMA, FGN, RANDOM_WALK)

_BURN_IN = 500
_MAX_EMBED_DOUBLINGS = 6


@dataclass(frozen=True)
class GenSpec:
    """What to generate. phi/theta feed the ARMA recursion, d the
    fractional integrator, hurst the fGn covariance, sigma the innovation
    (or fGn) standard deviation. offset shifts the series upward so that
    log-scale pipelines receive positive data."""

    kind: str
    n: int
    seed: int = 0
    phi: tuple = ()
    theta: tuple = ()
    d: float = 0.0
    hurst: float = 0.5
    sigma: float = 1.0
    offset: float = 0.0
    interval: float = 3600.0
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown generator kind {self.kind!r}")
        if self.n < 1:
            raise InvalidSpec("n must be >= 1")
        if self.sigma <= 0:
            raise InvalidSpec("sigma must be positive")
        if self.offset < 0:
            raise InvalidSpec("offset must be non-negative")
        if self.kind == FGN and not 0.0 < self.hurst < 1.0:
            raise InvalidSpec("fGn needs hurst in (0, 1)")
        if self.kind == ARFIMA and not -0.5 < self.d < 0.5:
            raise InvalidSpec("fractional generator needs d in (-0.5, 0.5)")
        if self.kind in (ARMA, ARFIMA) and not _admissible(self.phi, self.theta):
            raise InvalidSpec("phi/theta must be causal and invertible")


def _fgn_autocov(lags: np.ndarray, hurst: float, sigma2: float) -> np.ndarray:
    k = np.abs(lags).astype(float)
    two_h = 2.0 * hurst
    return 0.5 * sigma2 * (
        np.abs(k + 1) ** two_h - 2.0 * k**two_h + np.abs(k - 1) ** two_h
    )


def _davies_harte_fgn(n: int, hurst: float, sigma: float, rng) -> np.ndarray:
    """Exact fGn by circulant embedding of the covariance.

    The covariance sequence is wrapped onto a circle of size 2n and
    diagonalised by the FFT; the sample is the real part of the inverse
    transform of sqrt(eigenvalue)-weighted complex Gaussian draws. If any
    eigenvalue is negative the embedding is doubled before giving up.
    """
    m = 2 * n
    for _ in range(_MAX_EMBED_DOUBLINGS):
        g = _fgn_autocov(np.arange(m // 2 + 1), hurst, sigma**2)
        c = np.concatenate([g, g[-2:0:-1]])
        lam = np.fft.fft(c).real
        if lam.min() > -1e-8 * max(1.0, lam.max()):
            lam = np.clip(lam, 0.0, None)
            break
        m *= 2
    else:
        raise NonEmbeddableCovariance(
            f"circulant eigenvalues stayed negative up to embedding size {m}"
        )
    z = np.empty(m, dtype=complex)
    z[0] = rng.standard_normal() * np.sqrt(2.0)
    z[m // 2] = rng.standard_normal() * np.sqrt(2.0)
    re = rng.standard_normal(m // 2 - 1)
    im = rng.standard_normal(m // 2 - 1)
    z[1 : m // 2] = re + 1j * im
    z[m // 2 + 1 :] = np.conj(z[1 : m // 2][::-1])
    x = np.fft.ifft(np.sqrt(lam) * z) * np.sqrt(m / 2.0)
    return x.real[:n]


def generate(spec: GenSpec) -> TimeSeries:
    """Generate the series described by spec.

    The ARMA and fractional kinds simulate 500 burn-in samples that are
    discarded; the fractional kind drives white noise through the
    (1-B)**(-d) expansion truncated at the simulated length before any ARMA
    filtering. Identical specs yield identical output.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    if spec.kind == WHITE_NOISE:
        x = spec.sigma * rng.standard_normal(n)
    elif spec.kind == RANDOM_WALK:
        x = np.cumsum(spec.sigma * rng.standard_normal(n))
    elif spec.kind == ARMA:
        e = spec.sigma * rng.standard_normal(n + _BURN_IN)
        x = lfilter(_mapoly(spec.theta), _arpoly(spec.phi), e)[_BURN_IN:]
    elif spec.kind == ARFIMA:
        total = n + _BURN_IN
        e = spec.sigma * rng.standard_normal(total)
        eta = _fracint_weights(spec.d, total)
        y = fftconvolve(eta, e)[:total]
        if spec.phi or spec.theta:
            y = lfilter(_mapoly(spec.theta), _arpoly(spec.phi), y)
        x = y[_BURN_IN:]
    else:  # FGN
        x = _davies_harte_fgn(n, spec.hurst, spec.sigma, rng)
    x = x + spec.offset
    label = spec.label or f"{spec.kind}-n{spec.n}-seed{spec.seed}"
    return TimeSeries(x, start_time=0.0, interval=spec.interval, label=label)


def theoretical_acf_arfima0d0(d: float, max_lag: int) -> np.ndarray:
    """Exact autocorrelations of the pure fractional-noise process.

    rho(k) = rho(k-1) * (k-1+d) / (k-d) with rho(0) = 1; the sequence
    decays like k**(2d-1), the defining power law of long memory.
    """
    if not -0.5 < d < 0.5:
        raise InvalidD("theoretical ACF needs d in (-0.5, 0.5)")
    if max_lag < 0:
        raise InvalidD("max_lag must be non-negative")
    if max_lag == 0:
        return np.ones(1)
    k = np.arange(1, max_lag + 1, dtype=float)
    return np.concatenate(([1.0], np.cumprod((k - 1 + d) / (k - d))))
