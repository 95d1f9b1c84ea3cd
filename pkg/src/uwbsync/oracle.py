"""
Brute-force reference computations and convergence traces.

Nothing in here calls the FFT paths of :mod:`uwbsync.sigkit` for the
quantity it is checking: transforms and convolutions are plain sums,
interpolation is a sinc series and windowed energies are integrated in
closed form from the Fourier coefficients of the record.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import sigkit
from .candidates import extract_candidate, tap_count
from .errors import InvalidSignal, SizeGuardExceeded, ZeroEnergyInput
from .sigkit import (DenseSignal, EffectiveResponse, ImpulseResponse,
                     Spectrum, ideal_lowpass)

SIZE_GUARD = 4096


def _guard(n: int, what: str, limit: int = SIZE_GUARD):
    if n > limit:
        raise SizeGuardExceeded(f"{what}: size {n} exceeds the oracle guard {limit}")


def direct_convolve(h: DenseSignal, s: DenseSignal) -> DenseSignal:
    if not math.isclose(h.grid_step, s.grid_step, rel_tol=1e-12):
        raise sigkit.GridMismatch("grid steps differ")
    _guard(max(len(h), len(s)), "direct_convolve")
    a, b = h.samples, s.samples
    y = np.zeros(a.size + b.size - 1, dtype=complex)
    for i in range(a.size):
        y[i:i + b.size] += a[i] * b
    return DenseSignal(y * h.grid_step, h.grid_step, h.t0 + s.t0)


def direct_dft(x: DenseSignal) -> Spectrum:
    """Definition-level sum ``X(f) = dt * sum_n x[n] exp(-2j pi f t_n)``."""
    n = len(x)
    _guard(n, "direct_dft")
    dt = x.grid_step
    df = 1.0 / (n * dt)
    f0 = -(n // 2) * df
    freqs = f0 + np.arange(n) * df
    t = x.times
    bins = np.empty(n, dtype=complex)
    for k in range(n):
        bins[k] = dt * np.sum(x.samples * np.exp(-2j * np.pi * freqs[k] * t))
    return Spectrum(bins, df, f0, x.t0)


def trapezoid_energy(x: DenseSignal) -> float:
    p = np.abs(x.samples) ** 2
    return float(x.grid_step * (p.sum() - 0.5 * (p[0] + p[-1])))


def sinc_series(x: DenseSignal, times, chunk: int = 128) -> np.ndarray:
    """Shannon reconstruction ``sum_n x[n] sinc((t - t_n)/dt)``.

    The series is truncated to the samples of the record (no periodic
    images), so it matches a periodic interpolant only for signals that have
    decayed to zero at both ends of the record.
    """
    _guard(len(x), "sinc_series")
    t = np.asarray(times, dtype=float).ravel()
    tn = x.times
    out = np.empty(t.size, dtype=complex)
    for start in range(0, t.size, chunk):
        tt = t[start:start + chunk]
        out[start:start + chunk] = np.sinc((tt[:, None] - tn[None, :]) / x.grid_step) @ x.samples
    return out


def window_energy(x, a: float, b: float) -> float:
    """Exact ``integral_a^b |x(t)|^2 dt`` for the periodic interpolant of ``x``.

    Uses the Fourier coefficients of the record: the integral of every
    cross term ``exp(2j pi (f_k - f_m) t)`` is evaluated in closed form.
    Intended for bandlimited records; at most SIZE_GUARD nonzero bins.
    """
    s = x.signal if isinstance(x, (ImpulseResponse, EffectiveResponse)) else x
    n = len(s)
    period = n * s.grid_step
    X = np.fft.fft(s.samples) / n
    k = np.fft.fftfreq(n, 1.0 / n)
    if isinstance(x, EffectiveResponse):
        nz = np.flatnonzero(sigkit.band_mask(n, s.grid_step, x.bandwidth))
    else:
        nz = np.flatnonzero(np.abs(X) > 1e-12 * np.abs(X).max()) if np.any(X) else np.array([], int)
    if n % 2 == 0 and np.any(nz == n // 2):
        raise InvalidSignal("window_energy needs a record with an empty Nyquist bin")
    _guard(nz.size, "window_energy")
    if nz.size == 0:
        return 0.0
    # interpolant: x(t) = sum_k c_k exp(2j pi f_k (t - t0))
    c = X[nz]
    f = k[nz] / period
    nu = f[:, None] - f[None, :]
    ua, ub = a - s.t0, b - s.t0
    with np.errstate(divide="ignore", invalid="ignore"):
        integ = (np.exp(2j * np.pi * nu * ub) - np.exp(2j * np.pi * nu * ua)) / (2j * np.pi * nu)
    integ[nu == 0] = b - a
    return float(np.real(c @ integ @ np.conj(c)))


def plancherel_check(x) -> float:
    """Relative gap between time-domain and frequency-domain energy."""
    e_time = sigkit.energy(x)
    if e_time == 0:
        raise ZeroEnergyInput("plancherel_check needs a signal with nonzero energy")
    return abs(e_time - sigkit.dft(x).energy) / e_time


@dataclass
class ConvergenceTrace:
    """Discrepancy measured along a strictly decreasing parameter ladder."""

    ladder: np.ndarray
    discrepancy: np.ndarray
    order: float = field(init=False)

    def __post_init__(self):
        self.ladder = np.asarray(self.ladder, dtype=float)
        self.discrepancy = np.asarray(self.discrepancy, dtype=float)
        if self.ladder.size != self.discrepancy.size:
            raise ValueError("ladder and discrepancy lengths differ")
        if np.any(np.diff(self.ladder) >= 0):
            raise ValueError("ladder must be strictly decreasing")
        if np.any(self.discrepancy < 0):
            raise ValueError("discrepancies must be nonnegative")
        self.order = fit_order(self.ladder, self.discrepancy)

    def nonincreasing(self, slack: float = 0.0) -> bool:
        return bool(np.all(np.diff(self.discrepancy) <= slack))

    @property
    def ratios(self) -> np.ndarray:
        return self.discrepancy[:-1] / self.discrepancy[1:]


def fit_order(ladder, discrepancy) -> float:
    """Slope of log(discrepancy) against log(ladder); nan below 4 usable rungs."""
    ladder = np.asarray(ladder, float)
    discrepancy = np.asarray(discrepancy, float)
    ok = discrepancy > 0
    if ok.sum() < 4:
        return float("nan")
    slope, _ = np.polyfit(np.log(ladder[ok]), np.log(discrepancy[ok]), 1)
    return float(slope)


def approximation1_trace(h, bandwidths: Sequence[float]) -> ConvergenceTrace:
    """Energy lost to the lowpass, ``energy(h) - energy(h_T)``, per bandwidth.

    An impulse response is padded once for the smallest bandwidth so that
    every rung is filtered on the same grid; a plain dense signal is used
    as is.
    """
    bandwidths = np.asarray(sorted(bandwidths), float)
    hp = sigkit.pad(h, bandwidths[0]) if isinstance(h, ImpulseResponse) else h
    e = sigkit.energy(hp)
    deficit = [max(e - sigkit.energy(ideal_lowpass(hp, W)), 0.0) for W in bandwidths]
    return ConvergenceTrace(1.0 / bandwidths, deficit)


def _window_of(hT: EffectiveResponse, delay_spread: Optional[float]) -> float:
    ds = delay_spread if delay_spread is not None else hT.delay_spread
    if ds is None:
        raise ValueError("delay_spread is required for a plain effective response")
    return ds


def approximation2_trace(hT: EffectiveResponse, offsets: Sequence[float],
                         delay_spread: Optional[float] = None) -> ConvergenceTrace:
    """Change of the energy in ``[0, Ds]`` when ``h_T`` is delayed by each offset."""
    ds = _window_of(hT, delay_spread)
    ref = window_energy(hT, 0.0, ds)
    disc = [abs(ref - window_energy(hT, -d, ds - d)) for d in offsets]
    return ConvergenceTrace(offsets, disc)


def riemann_gain(hT: EffectiveResponse, offset: float, step: float, delay_spread: float) -> float:
    """``sum_{l < floor(Ds/step)} step * |h_T(l step - offset)|^2``."""
    count = tap_count(delay_spread, 1.0 / step)
    if count == 0:
        return 0.0
    vals = sigkit.sample_at(hT, np.arange(count) * step - offset)
    return float(step * np.vdot(vals, vals).real)


def approximation3_trace(hT: EffectiveResponse, offset: float, steps: Sequence[float],
                         delay_spread: Optional[float] = None) -> ConvergenceTrace:
    """Gap between ``integral_0^Ds |h_T(t - offset)|^2`` and its Riemann sums."""
    ds = _window_of(hT, delay_spread)
    ref = window_energy(hT, -offset, ds - offset)
    disc = [abs(ref - riemann_gain(hT, offset, step, ds)) for step in steps]
    return ConvergenceTrace(steps, disc)


@dataclass
class CombinationCheck:
    gap: float
    terms: tuple

    @property
    def bound(self) -> float:
        return float(sum(self.terms))

    def holds(self, slack: float = 1e-8) -> bool:
        return self.gap <= self.bound + slack


def combination_check(h: ImpulseResponse, W: float, offset: float) -> CombinationCheck:
    """Compare ``|energy(h) - gain|`` with the sum of the three windowed gaps.

    The gain is that of the candidate with ``k = 0`` at the given offset.
    Terms are (lowpass, translation, Riemann) discrepancies on ``[0, Ds]``.
    """
    ds = h.delay_spread
    hT = ideal_lowpass(h, W)
    T = 1.0 / W
    e_h = sigkit.energy(h)
    w0 = window_energy(hT, 0.0, ds)
    wd = window_energy(hT, -offset, ds - offset)
    gain = extract_candidate(hT, offset, 0).gain
    riem = riemann_gain(hT, offset, T, ds)
    terms = (abs(e_h - w0), abs(w0 - wd), abs(wd - riem))
    return CombinationCheck(abs(e_h - gain), terms)


# -- verification suite -------------------------------------------------------

@dataclass
class CheckResult:
    check: str
    metric: str
    value: float
    limit: float
    passed: bool


def _rel(a, b) -> float:
    scale = np.max(np.abs(b))
    return float(np.max(np.abs(a - b)) / scale) if scale > 0 else float(np.max(np.abs(a)))


def random_signal(rng: np.random.Generator, n: int, dt: float = 1.0, pad_ends: int = 0) -> DenseSignal:
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if pad_ends:
        x[:pad_ends] = 0
        x[-pad_ends:] = 0
    return DenseSignal(x, dt, float(rng.integers(-20, 20)) * dt)


def random_smooth_signal(rng: np.random.Generator, n: int, dt: float = 1.0) -> DenseSignal:
    """Sum of Gaussian pulses: negligible energy near Nyquist and at the record ends."""
    t = np.arange(n, dtype=float)
    x = np.zeros(n, dtype=complex)
    for _ in range(int(rng.integers(2, 6))):
        centre = rng.uniform(0.35, 0.65) * n
        width = rng.uniform(3.0, 6.0)
        freq = rng.uniform(-0.12, 0.12)
        amp = rng.standard_normal() + 1j * rng.standard_normal()
        x += amp * np.exp(-0.5 * ((t - centre) / width) ** 2 + 2j * np.pi * freq * t)
    return DenseSignal(x, dt, 0.0)


def smooth_impulse_response(rng: np.random.Generator, delay_spread: float, grid_step: float,
                            pulses: int = 25, width: float = 2e-9) -> ImpulseResponse:
    """Unit-energy response made of Gaussian pulses with exponentially fading weights.

    Pulse centres stay ``7.5 width`` away from both ends of ``[0, delay_spread]``.
    """
    n = int(np.floor(delay_spread / grid_step + 1e-9)) + 1
    t = np.arange(n) * grid_step
    x = np.zeros(n, dtype=complex)
    margin = 7.5 * width
    for tau in rng.uniform(margin, delay_spread - margin, pulses):
        amp = np.exp(-tau / (delay_spread / 4)) * (rng.standard_normal() + 1j * rng.standard_normal())
        x += amp * np.exp(-0.5 * ((t - tau) / width) ** 2)
    sig = DenseSignal(x, grid_step, 0.0)
    return ImpulseResponse(sig.with_samples(x / np.sqrt(sigkit.energy(sig))), delay_spread)


def run_checks(seed: int = 0, instances: int = 100,
               log: Optional[Callable[[CheckResult], None]] = None) -> List[CheckResult]:
    """Cross-check every fast path against its oracle and run the traces.

    Returns one :class:`CheckResult` per check; ``value`` is the worst case
    over all randomized instances.
    """
    from .chanmodel import ClusterModelParams, generate

    rng = np.random.default_rng(seed)
    results = []

    def add(check, metric, value, limit, passed=None):
        ok = bool(value <= limit) if passed is None else bool(passed)
        r = CheckResult(check, metric, float(value), float(limit), ok)
        results.append(r)
        if log:
            log(r)

    worst = 0.0
    for _ in range(instances):
        h = random_signal(rng, int(rng.integers(1, 257)))
        s = random_signal(rng, int(rng.integers(1, 257)))
        worst = max(worst, _rel(sigkit.convolve(h, s).samples, direct_convolve(h, s).samples))
    add("convolve_vs_direct", "max_rel_err", worst, 1e-9)

    worst = 0.0
    for _ in range(instances):
        x = random_signal(rng, int(rng.integers(1, 129)))
        worst = max(worst, _rel(sigkit.dft(x).bins, direct_dft(x).bins))
    add("dft_vs_direct", "max_rel_err", worst, 1e-10)

    worst = 0.0
    for _ in range(instances):
        x = random_smooth_signal(rng, 256)
        t = rng.uniform(0, 255, size=64)
        worst = max(worst, _rel(sigkit.sample_at(x, t), sinc_series(x, t)))
    add("sample_at_vs_sinc_series", "max_rel_err", worst, 1e-7)

    worst = 0.0
    for _ in range(instances):
        x = random_signal(rng, int(rng.integers(2, 300)))
        worst = max(worst, plancherel_check(x))
    add("plancherel", "max_rel_gap", worst, 1e-6)

    params = ClusterModelParams(rng_seed=seed)
    cirs = generate(params, 3)
    ladder = 4e6 * 2.0 ** np.arange(9)
    ok = all(approximation1_trace(c.response, ladder).nonincreasing() for c in cirs)
    add("approximation1_nonincreasing", "all_rungs", 0.0, 0.0, ok)

    hT = ideal_lowpass(cirs[0].response, 64e6)
    offsets = (1.0 / 64e6) * 0.5 ** np.arange(1, 9)
    tr2 = approximation2_trace(hT, offsets)
    add("approximation2_nonincreasing", "max_step_increase",
        float(np.max(np.diff(tr2.discrepancy))), 1e-9)

    ds = params.target_delay_spread
    steps = ds / 2.0 ** np.arange(8, 13)
    rise, order = -np.inf, np.inf
    for _ in range(5):
        h = smooth_impulse_response(rng, ds, cirs[0].response.signal.grid_step)
        tr3 = approximation3_trace(ideal_lowpass(h, 32e6), 0.3 / 32e6, steps)
        rise = max(rise, float(np.max(np.diff(tr3.discrepancy))))
        order = min(order, tr3.order)
    add("approximation3_nonincreasing", "max_step_increase", rise, 0.0)
    add("approximation3_order", "fitted_order_min", order, 1.0, order >= 1.0)

    worst = -np.inf
    for c in generate(params, 10, start=3):
        T = 1.0 / 256e6
        chk = combination_check(c.response, 256e6, float(rng.uniform(0, T)))
        worst = max(worst, chk.gap - chk.bound)
    add("combination_bound", "max_gap_minus_bound", worst, 1e-8)
    return results
