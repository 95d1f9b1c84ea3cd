"""
Channel candidates, energy-based acquisition and phase penalties.

A receiver sampling the effective response ``h_T`` with period ``T`` and
fractional offset ``delta`` sees the taps ``h_T(kT + lT - delta)`` for
``l = 0 .. L-1``, with ``L = floor(Ds / T)``.  Their captured energy
``T * sum |tap|^2`` is the candidate gain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from . import sigkit
from .errors import EmptyWindow, OffsetOutOfRange
from .sigkit import EffectiveResponse, ImpulseResponse, ideal_lowpass

DEFAULT_PHASES = 4


def tap_count(Ds: float, W: float) -> int:
    """``floor(Ds * W)``, tolerant to round-off when the product is an integer."""
    if Ds < 0 or not W > 0:
        raise ValueError("need Ds >= 0 and W > 0")
    return int(math.floor(Ds * W * (1 + 1e-12)))


def split_offset(d: float, T: float) -> Tuple[int, float]:
    """Split a timing offset into whole sample periods and a remainder in ``[0, T)``."""
    k = math.floor(d / T)
    delta = d - k * T
    if delta >= T:
        k, delta = k + 1, 0.0
    elif delta < 0:
        delta = 0.0
    return k, delta


@dataclass(eq=False)
class ChannelCandidate:
    taps: np.ndarray
    offset: float
    sample_time: float
    k: int = 0

    @property
    def L(self) -> int:
        return self.taps.size

    @property
    def gain(self) -> float:
        return float(self.sample_time * np.vdot(self.taps, self.taps).real)


@dataclass(eq=False)
class AcquisitionResult:
    best_k: int
    candidate: ChannelCandidate
    gains: np.ndarray   # gain for every k of the searched window, in window order


@dataclass(eq=False)
class PenaltyRecord:
    realization: int
    gains: np.ndarray
    eps: float = 0.0

    @property
    def max_penalty(self) -> float:
        return penalty_from_gains(self.gains)


def penalty_from_gains(gains: Sequence[float]) -> float:
    """``1 - min/max`` of the per-phase gains (0 if every gain is zero)."""
    g = np.asarray(gains, dtype=float)
    top = g.max()
    if top <= 0:
        return 0.0
    return float(min(max(1.0 - g.min() / top, 0.0), 1.0))


def _taps_and_period(hT: EffectiveResponse):
    if hT.delay_spread is None:
        raise ValueError("effective response carries no delay spread; tap count is undefined")
    T = hT.sample_time
    return tap_count(hT.delay_spread, hT.bandwidth), T


def _check_offset(delta: float, T: float):
    if not (0.0 <= delta < T):
        raise OffsetOutOfRange(f"offset {delta:.6g} s outside [0, {T:.6g}) s")


def extract_candidate(hT: EffectiveResponse, delta: float, k: int = 0) -> ChannelCandidate:
    """Taps ``h_T(kT + lT - delta)`` for ``0 <= l < L``."""
    L, T = _taps_and_period(hT)
    _check_offset(delta, T)
    times = (k + np.arange(L)) * T - delta
    return ChannelCandidate(sigkit.sample_at(hT, times), float(delta), T, int(k))


def default_window(L: int) -> range:
    return range(-L, L + 1)


def acquire(hT: EffectiveResponse, delta: float,
            k_window: Optional[range] = None) -> AcquisitionResult:
    """Pick the whole-period shift ``k`` whose candidate captures the most energy.

    The default window is ``k = -L .. L``.  Ties go to the smallest ``k``.
    """
    L, T = _taps_and_period(hT)
    _check_offset(delta, T)
    window = default_window(L) if k_window is None else k_window
    ks = np.asarray(list(window), dtype=np.int64)
    if ks.size == 0:
        raise EmptyWindow("acquisition window is empty")
    ks.sort()
    k_lo, k_hi = int(ks[0]), int(ks[-1])
    # samples for every n in [k_lo, k_hi + L - 1], one interpolation pass
    n = np.arange(k_lo, k_hi + L) if L else np.arange(k_lo, k_lo)
    vals = sigkit.sample_at(hT, n * T - delta)
    if L:
        energy = np.concatenate([[0.0], np.cumsum(np.abs(vals) ** 2)])
        pos = ks - k_lo
        gains = T * (energy[pos + L] - energy[pos])
    else:
        gains = np.zeros(ks.size)
    best = int(np.argmax(gains))
    k = int(ks[best])
    taps = vals[k - k_lo:k - k_lo + L] if L else np.zeros(0, complex)
    return AcquisitionResult(k, ChannelCandidate(taps.copy(), float(delta), T, k), gains)


def phase_gains(hT: EffectiveResponse, eps: float, M: int = DEFAULT_PHASES,
                k_window: Optional[range] = None) -> np.ndarray:
    """Acquired gain at offsets ``eps + m T / M`` for ``m = 0 .. M-1``."""
    T = hT.sample_time
    if M < 2:
        raise ValueError("need at least two phases")
    if not (0.0 <= eps < T / M):
        raise OffsetOutOfRange(f"eps {eps:.6g} s outside [0, T/M)")
    return np.array([acquire(hT, eps + m * T / M, k_window).candidate.gain for m in range(M)])


def phase_penalty(h: ImpulseResponse, W: float, eps: float, M: int = DEFAULT_PHASES,
                  realization: int = 0, k_window: Optional[range] = None) -> PenaltyRecord:
    """Worst relative gain loss over ``M`` sampling phases spaced ``T/M`` apart."""
    hT = ideal_lowpass(h, W)
    return PenaltyRecord(realization, phase_gains(hT, eps, M, k_window), float(eps))
