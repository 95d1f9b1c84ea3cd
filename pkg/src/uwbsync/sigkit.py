"""
Bandlimited signal toolkit on a dense time grid.

A continuous-time signal is represented by its samples on a uniform grid
with step ``grid_step`` that is much finer than any sampling interval of
interest.  Spectral operations treat the record as one period of a
periodic signal, so callers pad with zeros (see :func:`pad`) before
filtering or shifting anything with finite support.

Conventions
-----------
* ``energy`` is the left Riemann sum ``grid_step * sum(|x|**2)``.
* ``dft`` approximates the continuous Fourier transform: bins are scaled by
  ``grid_step`` and referenced to the absolute time origin, so that
  ``sum(|X|**2) * freq_step == energy(x)``.
* A lowpass of bandwidth ``W`` keeps the two-sided band ``[-W/2, W/2)`` of a
  complex baseband signal.  The band is half-open so that sampling the result
  at rate ``W`` is alias free.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import fft as sfft
from scipy import signal as ssignal

from .errors import (BandwidthExceedsGrid, GridMismatch, InvalidSignal,
                     TimeOutOfRange)

__all__ = [
    "DenseSignal", "Spectrum", "ImpulseResponse", "EffectiveResponse",
    "dft", "idft", "energy", "ideal_lowpass", "sample_at", "convolve",
    "delay", "pad", "band_mask", "samples_per_period",
]

# Fractional sample offsets closer than this to an integer are snapped to the grid.
_SNAP = 1e-9
# Above this many distinct fractional offsets, sample_at evaluates the
# trigonometric series directly instead of one phase-ramp FFT per offset.
_MAX_SHIFT_GROUPS = 16


@dataclass(frozen=True, eq=False)
class DenseSignal:
    """Samples of a signal at ``t0 + n * grid_step``, ``n = 0 .. len-1``."""

    samples: np.ndarray
    grid_step: float
    t0: float = 0.0

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        if samples.ndim != 1 or samples.size == 0:
            raise InvalidSignal("samples must be a non-empty 1-D sequence")
        if not (np.isfinite(self.grid_step) and self.grid_step > 0):
            raise InvalidSignal(f"grid_step must be positive, got {self.grid_step}")
        if not np.all(np.isfinite(samples)):
            raise InvalidSignal("samples must be finite")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "grid_step", float(self.grid_step))
        object.__setattr__(self, "t0", float(self.t0))

    def __len__(self):
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) * self.grid_step

    @property
    def t_end(self) -> float:
        """Time of the last sample."""
        return self.t0 + (self.samples.size - 1) * self.grid_step

    def with_samples(self, samples) -> "DenseSignal":
        return DenseSignal(samples, self.grid_step, self.t0)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Bins at ``f0 + k * freq_step`` in ascending frequency order.

    ``t0`` is the time origin of the transformed record; it is needed to
    invert the transform.
    """

    bins: np.ndarray
    freq_step: float
    f0: float
    t0: float = 0.0

    def __post_init__(self):
        bins = np.array(self.bins, dtype=complex)
        bins.flags.writeable = False
        object.__setattr__(self, "bins", bins)

    @property
    def frequencies(self) -> np.ndarray:
        return self.f0 + np.arange(self.bins.size) * self.freq_step

    @property
    def energy(self) -> float:
        return float(self.freq_step * np.vdot(self.bins, self.bins).real)


@dataclass(frozen=True, eq=False)
class ImpulseResponse:
    """A dense signal that vanishes outside ``[0, delay_spread]``."""

    signal: DenseSignal
    delay_spread: float

    def __post_init__(self):
        if not self.delay_spread > 0:
            raise InvalidSignal("delay_spread must be positive")
        t = self.signal.times
        tol = _SNAP * self.signal.grid_step
        outside = (t < -tol) | (t > self.delay_spread + tol)
        if np.any(self.signal.samples[outside] != 0):
            raise InvalidSignal("impulse response is nonzero outside [0, delay_spread]")


@dataclass(frozen=True, eq=False)
class EffectiveResponse:
    """Lowpass-filtered response of bandwidth ``bandwidth`` (sample time ``1/bandwidth``).

    ``delay_spread`` is carried over from the source impulse response; it
    fixes the tap count of channel candidates and is None for responses
    filtered from a plain :class:`DenseSignal`.
    """

    signal: DenseSignal
    bandwidth: float
    delay_spread: Optional[float] = None

    @property
    def sample_time(self) -> float:
        return 1.0 / self.bandwidth


SignalLike = Union[DenseSignal, ImpulseResponse, EffectiveResponse]


def _as_dense(x: SignalLike) -> DenseSignal:
    if isinstance(x, DenseSignal):
        return x
    if isinstance(x, (ImpulseResponse, EffectiveResponse)):
        return x.signal
    raise TypeError(f"expected a signal, got {type(x).__name__}")


def _signed_bins(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, 1.0 / n)


def energy(x: SignalLike) -> float:
    s = _as_dense(x)
    return float(s.grid_step * np.vdot(s.samples, s.samples).real)


def dft(x: SignalLike) -> Spectrum:
    """Grid approximation of the continuous Fourier transform of ``x``."""
    s = _as_dense(x)
    n = len(s)
    freqs = np.fft.fftshift(np.fft.fftfreq(n, s.grid_step))
    bins = np.fft.fftshift(sfft.fft(s.samples)) * s.grid_step
    bins *= np.exp(-2j * np.pi * freqs * s.t0)
    return Spectrum(bins, 1.0 / (n * s.grid_step), float(freqs[0]), s.t0)


def idft(spec: Spectrum) -> DenseSignal:
    n = spec.bins.size
    grid_step = 1.0 / (n * spec.freq_step)
    bins = spec.bins * np.exp(2j * np.pi * spec.frequencies * spec.t0)
    samples = sfft.ifft(np.fft.ifftshift(bins)) / grid_step
    return DenseSignal(samples, grid_step, spec.t0)


def samples_per_period(bandwidth: float, grid_step: float) -> Optional[int]:
    """Return ``1 / (bandwidth * grid_step)`` if it is an integer, else None."""
    m = 1.0 / (bandwidth * grid_step)
    r = round(m)
    if r >= 1 and abs(m - r) <= 1e-9 * m:
        return int(r)
    return None


def band_mask(n: int, grid_step: float, bandwidth: float) -> np.ndarray:
    """Boolean mask over unshifted FFT bins inside ``[-bandwidth/2, bandwidth/2)``."""
    half = 0.5 * bandwidth * n * grid_step
    k = _signed_bins(n)
    eps = 1e-9
    return (k >= -half - eps) & (k < half - eps)


def pad(h: ImpulseResponse, bandwidth: float) -> ImpulseResponse:
    """Zero-pad ``h`` so that it can be filtered to ``bandwidth`` and sampled.

    Each side gets a guard of ``1.5 * Ds + 2 T`` (``T = 1/bandwidth``), which
    holds every acquisition window of the candidate search and keeps the
    record at least four times the support.  When ``T`` is a whole number of
    grid steps the record length is made a multiple of it, so that sampling
    at rate ``bandwidth`` covers whole periods of the record.  Returns ``h``
    unchanged if it already satisfies all of this.
    """
    s = h.signal
    ds = h.delay_spread
    dt = s.grid_step
    guard = 1.5 * ds + 2.0 / bandwidth
    period = samples_per_period(bandwidth, dt) or 1
    tol = _SNAP * dt

    if s.t0 <= -guard + tol and s.t_end >= ds + guard - tol and len(s) % period == 0:
        return h

    left = max(0, math.ceil((s.t0 + guard) / dt - _SNAP))
    right = max(0, math.ceil((ds + guard - s.t_end) / dt - _SNAP))
    need = left + len(s) + right
    n = period * sfft.next_fast_len(-(-need // period))
    right += n - need
    samples = np.concatenate([np.zeros(left, complex), s.samples, np.zeros(right, complex)])
    return ImpulseResponse(DenseSignal(samples, dt, s.t0 - left * dt), ds)


def ideal_lowpass(h: SignalLike, W: float) -> EffectiveResponse:
    """Brick-wall lowpass of ``h`` to the two-sided band ``[-W/2, W/2)``.

    An :class:`ImpulseResponse` is first zero-padded with :func:`pad`; plain
    dense signals and effective responses are filtered on their own grid,
    which makes the operation an exact projection.

    Raises
    ------
    BandwidthExceedsGrid
        If ``W`` exceeds half the grid sample rate.
    """
    if not W > 0:
        raise BandwidthExceedsGrid(f"bandwidth must be positive, got {W}")
    delay_spread = None
    if isinstance(h, ImpulseResponse):
        if W > 0.5 / h.signal.grid_step * (1 + 1e-12):
            raise BandwidthExceedsGrid(
                f"W={W:g} Hz exceeds the grid limit {0.5 / h.signal.grid_step:g} Hz")
        delay_spread = h.delay_spread
        h = pad(h, W)
    elif isinstance(h, EffectiveResponse):
        delay_spread = h.delay_spread
    s = _as_dense(h)
    if W > 0.5 / s.grid_step * (1 + 1e-12):
        raise BandwidthExceedsGrid(
            f"W={W:g} Hz exceeds the grid limit {0.5 / s.grid_step:g} Hz")
    X = sfft.fft(s.samples)
    X[~band_mask(len(s), s.grid_step, W)] = 0.0
    return EffectiveResponse(s.with_samples(sfft.ifft(X)), float(W), delay_spread)


def _phase_ramp(n: int, frac: float) -> np.ndarray:
    # Advances the periodic interpolant by ``frac`` samples; the Nyquist bin
    # of an even-length record is split evenly between +/- fs/2.
    k = _signed_bins(n)
    ramp = np.exp(2j * np.pi * k * frac / n)
    if n % 2 == 0:
        ramp[n // 2] = np.cos(np.pi * frac)
    return ramp


def _direct_trig(X: np.ndarray, u: np.ndarray, keep: Optional[np.ndarray] = None,
                 chunk: int = 256) -> np.ndarray:
    n = X.size
    coef = X.copy()
    out = np.empty(u.size, dtype=complex)
    nyq = None
    if n % 2 == 0:
        nyq = coef[n // 2]
        coef[n // 2] = 0.0
    idx = np.flatnonzero(keep) if keep is not None else np.arange(n)
    k = _signed_bins(n)[idx]
    coef = coef[idx]
    for start in range(0, u.size, chunk):
        uu = u[start:start + chunk]
        vals = np.exp(2j * np.pi * np.outer(uu, k) / n) @ coef
        if nyq is not None:
            vals += nyq * np.cos(np.pi * uu)
        out[start:start + chunk] = vals / n
    return out


def sample_at(x: SignalLike, times) -> np.ndarray:
    """Evaluate the bandlimited (periodic) interpolant of ``x`` at ``times``.

    Times on the grid return the stored samples exactly.  Times sharing a
    fractional grid offset are served by a single phase-ramp FFT; otherwise
    the trigonometric series is summed directly, over the passband bins only
    when ``x`` is an :class:`EffectiveResponse`.

    Raises
    ------
    TimeOutOfRange
        If a time lies outside ``[t0, t_end]`` of the record.
    """
    s = _as_dense(x)
    t = np.asarray(times, dtype=float)
    shape = t.shape
    t = t.ravel()
    if t.size == 0:
        return np.zeros(shape, dtype=complex)
    n = len(s)
    u = (t - s.t0) / s.grid_step
    if u.min() < -_SNAP or u.max() > n - 1 + _SNAP:
        bad = t[(u < -_SNAP) | (u > n - 1 + _SNAP)][0]
        raise TimeOutOfRange(
            f"time {bad:.6g} s outside the record [{s.t0:.6g}, {s.t_end:.6g}] s")
    base = np.floor(u)
    frac = u - base
    up = frac > 1 - _SNAP
    base[up] += 1
    frac[up] = 0.0
    frac[frac < _SNAP] = 0.0
    base = np.clip(base.astype(np.int64), 0, n - 1)

    out = np.empty(t.size, dtype=complex)
    groups = np.unique(frac)
    on_grid = frac == 0.0
    out[on_grid] = s.samples[base[on_grid]]
    off = groups[groups != 0.0]
    if off.size:
        X = sfft.fft(s.samples)
        keep = None
        if isinstance(x, EffectiveResponse):
            # out-of-band bins hold only round-off
            keep = band_mask(n, s.grid_step, x.bandwidth)
            X[~keep] = 0.0
        if off.size <= _MAX_SHIFT_GROUPS:
            for f in off:
                sel = frac == f
                shifted = sfft.ifft(X * _phase_ramp(n, f))
                out[sel] = shifted[base[sel]]
        else:
            sel = ~on_grid
            out[sel] = _direct_trig(X, u[sel], keep)
    return out.reshape(shape)


def delay(x: SignalLike, d: float) -> DenseSignal:
    """Return ``x(t - d)`` on the grid of ``x`` (circular, phase-ramp shift)."""
    s = _as_dense(x)
    n = len(s)
    X = sfft.fft(s.samples) * _phase_ramp(n, -d / s.grid_step)
    return s.with_samples(sfft.ifft(X))


def convolve(h: SignalLike, s: SignalLike) -> DenseSignal:
    """Riemann approximation of ``y(t) = integral h(tau) s(t - tau) dtau``."""
    h, s = _as_dense(h), _as_dense(s)
    if not math.isclose(h.grid_step, s.grid_step, rel_tol=1e-12):
        raise GridMismatch(f"grid steps differ: {h.grid_step} vs {s.grid_step}")
    y = ssignal.fftconvolve(h.samples, s.samples) * h.grid_step
    return DenseSignal(y, h.grid_step, h.t0 + s.t0)
