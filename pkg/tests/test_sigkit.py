import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uwbsync import sigkit
from uwbsync.errors import (BandwidthExceedsGrid, GridMismatch, InvalidSignal,
                            TimeOutOfRange)
from uwbsync.oracle import (direct_convolve, direct_dft, random_signal,
                            random_smooth_signal, sinc_series, trapezoid_energy)
from uwbsync.sigkit import DenseSignal, ImpulseResponse


def rel_err(a, b):
    return np.max(np.abs(a - b)) / np.max(np.abs(b))


def bandlimited(rng, n, dt, W, t0=0.0):
    """Random record whose spectrum lives strictly inside [-W/2, W/2)."""
    k = np.fft.fftfreq(n, 1.0 / n)
    half = 0.5 * W * n * dt
    X = np.zeros(n, complex)
    inside = (k > -half + 1) & (k < half - 1)
    X[inside] = rng.standard_normal(inside.sum()) + 1j * rng.standard_normal(inside.sum())
    return DenseSignal(np.fft.ifft(X), dt, t0)


def tone(n, dt, f, t0=0.0):
    t = t0 + np.arange(n) * dt
    return DenseSignal(np.exp(2j * np.pi * f * t), dt, t0)


# -- types -----------------------------------------------------------------------

def test_dense_signal_validation():
    with pytest.raises(InvalidSignal):
        DenseSignal([], 1.0)
    with pytest.raises(InvalidSignal):
        DenseSignal([1.0], 0.0)
    with pytest.raises(InvalidSignal):
        DenseSignal([np.nan], 1.0)


def test_impulse_response_support_enforced():
    sig = DenseSignal([0, 1, 1, 0, 0], 1.0, -1.0)
    ImpulseResponse(sig, 2.0)
    with pytest.raises(InvalidSignal):
        ImpulseResponse(sig, 0.5)
    with pytest.raises(InvalidSignal):
        ImpulseResponse(DenseSignal([1.0, 0.0], 1.0, -1.0), 3.0)


# -- dft -------------------------------------------------------------------------

def test_dft_of_zero_is_zero():
    spec = sigkit.dft(DenseSignal(np.zeros(32), 0.5))
    assert np.all(spec.bins == 0)


def test_dft_of_on_grid_exponential_is_single_bin():
    n, dt = 64, 1e-3
    f = 5 / (n * dt)
    spec = sigkit.dft(tone(n, dt, f, t0=0.01))
    mag = np.abs(spec.bins)
    peak = np.argmax(mag)
    assert spec.frequencies[peak] == pytest.approx(f)
    assert np.all(np.delete(mag, peak) < 1e-12 * mag[peak])


def test_dft_matches_direct_sum():
    rng = np.random.default_rng(1)
    x = random_signal(rng, 64, dt=0.25)
    assert rel_err(sigkit.dft(x).bins, direct_dft(x).bins) < 1e-10


@pytest.mark.parametrize("n", [1, 2, 7, 64, 1000])
def test_dft_round_trip(n):
    rng = np.random.default_rng(n)
    x = random_signal(rng, n, dt=3e-11)
    y = sigkit.idft(sigkit.dft(x))
    assert y.grid_step == pytest.approx(x.grid_step)
    assert y.t0 == x.t0
    assert rel_err(y.samples, x.samples) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 400), st.integers(0, 2 ** 32 - 1))
def test_parseval(n, seed):
    x = random_signal(np.random.default_rng(seed), n, dt=1e-9)
    e = sigkit.energy(x)
    assert abs(e - sigkit.dft(x).energy) / e <= 1e-6


# -- energy ----------------------------------------------------------------------

def test_energy_of_zero():
    assert sigkit.energy(DenseSignal(np.zeros(10), 1.0)) == 0.0


def test_energy_of_rectangle():
    A, dt, n = 2.5, 1e-9, 40
    x = DenseSignal(np.concatenate([np.zeros(5), A * np.ones(n), np.zeros(5)]), dt)
    assert sigkit.energy(x) == pytest.approx(A ** 2 * n * dt, rel=1e-14)


def test_energy_matches_trapezoid_for_padded_signal():
    rng = np.random.default_rng(2)
    x = random_signal(rng, 500, dt=1e-10, pad_ends=3)
    assert sigkit.energy(x) == pytest.approx(trapezoid_energy(x), rel=1e-9)


# -- lowpass ---------------------------------------------------------------------

def test_lowpass_passes_bandlimited_signal():
    rng = np.random.default_rng(3)
    x = bandlimited(rng, 512, 1.0, 0.2)
    y = sigkit.ideal_lowpass(x, 0.2)
    assert rel_err(y.signal.samples, x.samples) < 1e-10


def test_lowpass_removes_out_of_band_tone():
    n, dt, W = 512, 1.0, 0.2
    f = round(0.9 * W * n * dt) / (n * dt)
    x = tone(n, dt, f)
    y = sigkit.ideal_lowpass(x, W)
    assert sigkit.energy(y) < 1e-10 * sigkit.energy(x)


def test_lowpass_halves_two_tone_energy():
    n, dt, W = 256, 1.0, 0.25
    df = 1.0 / (n * dt)
    x = DenseSignal(tone(n, dt, 10 * df).samples + tone(n, dt, -50 * df).samples, dt)
    # expected: in-band share of the direct-sum spectrum
    ref = direct_dft(x)
    inside = (ref.frequencies >= -W / 2) & (ref.frequencies < W / 2)
    expected = df * np.sum(np.abs(ref.bins[inside]) ** 2)
    got = sigkit.energy(sigkit.ideal_lowpass(x, W))
    assert got == pytest.approx(expected, rel=1e-9)
    assert got == pytest.approx(0.5 * sigkit.energy(x), rel=1e-9)


def test_lowpass_rejects_bandwidth_above_grid_limit():
    x = DenseSignal(np.ones(16), 1.0)
    with pytest.raises(BandwidthExceedsGrid):
        sigkit.ideal_lowpass(x, 0.6)
    with pytest.raises(BandwidthExceedsGrid):
        sigkit.ideal_lowpass(x, 0.0)
    sigkit.ideal_lowpass(x, 0.5)


def test_lowpass_is_idempotent():
    rng = np.random.default_rng(4)
    x = random_signal(rng, 300, dt=1.0)
    once = sigkit.ideal_lowpass(x, 0.3)
    twice = sigkit.ideal_lowpass(once, 0.3)
    assert rel_err(twice.signal.samples, once.signal.samples) < 1e-12


def test_lowpass_output_spectrum_is_confined(cir):
    W = 64e6
    hT = sigkit.ideal_lowpass(cir, W)
    spec = sigkit.dft(hT)
    out = (spec.frequencies < -W / 2) | (spec.frequencies >= W / 2)
    assert np.max(np.abs(spec.bins[out])) < 1e-12 * np.max(np.abs(spec.bins))
    assert hT.delay_spread == cir.delay_spread
    assert hT.sample_time == pytest.approx(1 / W)


def test_lowpass_pads_impulse_response(cir):
    W = 16e6
    hT = sigkit.ideal_lowpass(cir, W)
    s = hT.signal
    ds, T = cir.delay_spread, 1 / W
    assert s.t0 <= -(1.5 * ds + 2 * T)
    assert s.t_end >= ds + 1.5 * ds + 2 * T
    assert len(s) % sigkit.samples_per_period(W, s.grid_step) == 0
    assert len(s) * s.grid_step >= 3 * ds


def test_energy_contraction_over_doubling_ladder(cir):
    hp = sigkit.pad(cir, 4e6)
    e = sigkit.energy(hp)
    deficits = [e - sigkit.energy(sigkit.ideal_lowpass(hp, W)) for W in 4e6 * 2.0 ** np.arange(9)]
    assert min(deficits) >= -1e-12
    assert np.all(np.diff(deficits) <= 1e-12)


# -- sample_at -------------------------------------------------------------------

def test_sample_at_on_grid_is_exact():
    rng = np.random.default_rng(5)
    x = random_signal(rng, 100, dt=0.1)
    idx = np.array([0, 3, 50, 99])
    assert np.array_equal(sigkit.sample_at(x, x.times[idx]), x.samples[idx])


def test_sample_at_sinc_zero_crossings():
    # periodic sinc of bandwidth B = 1 on a grid whose step does not divide 1/B
    dt, n = 1 / 6.5, 13 * 8
    delta = np.zeros(n, complex)
    centre = 40
    delta[centre] = 1 / dt
    x = sigkit.ideal_lowpass(DenseSignal(delta, dt, 0.0), 1.0)
    tc = centre * dt
    vals = sigkit.sample_at(x, tc + np.arange(-4, 5))
    assert abs(vals[4] - 1.0) < 1e-12
    assert np.max(np.abs(np.delete(vals, 4))) < 1e-8


def test_sample_at_matches_sinc_series():
    rng = np.random.default_rng(6)
    x = random_smooth_signal(rng, 512)
    t = rng.uniform(0, 511, size=1000)
    assert rel_err(sigkit.sample_at(x, t), sinc_series(x, t)) < 1e-7


def test_sample_at_grouped_and_direct_paths_agree():
    rng = np.random.default_rng(7)
    x = random_signal(rng, 256, dt=1.0)
    t = np.repeat(rng.uniform(0, 200, size=3), 4) + np.tile(np.arange(4), 3)
    grouped = sigkit.sample_at(x, t)
    spread = sigkit.sample_at(x, np.concatenate([t, rng.uniform(0, 255, 40)]))[:t.size]
    assert rel_err(grouped, spread) < 1e-11


def test_sample_at_out_of_range():
    x = DenseSignal(np.ones(10), 1.0, 5.0)
    with pytest.raises(TimeOutOfRange):
        sigkit.sample_at(x, [4.5])
    with pytest.raises(TimeOutOfRange):
        sigkit.sample_at(x, [14.2])
    sigkit.sample_at(x, [5.0, 14.0])


def test_shift_round_trip():
    rng = np.random.default_rng(8)
    x = bandlimited(rng, 400, 1.0, 0.3)
    d = 0.37
    back = sigkit.delay(sigkit.delay(x, d), -d)
    assert rel_err(back.samples, x.samples) < 1e-8
    # the same through sample_at: evaluate the shifted record at t + d
    y = sigkit.delay(x, d)
    vals = sigkit.sample_at(y, x.times[10:300] + d)
    assert rel_err(vals, x.samples[10:300]) < 1e-8


def test_translation_distance_shrinks_as_offset_halves(cir):
    hT = sigkit.ideal_lowpass(cir, 128e6)
    offsets = (1 / 128e6) * 0.5 ** np.arange(8)
    dist = [np.sqrt(sigkit.energy(hT.signal.with_samples(sigkit.delay(hT, d).samples
                                                         - hT.signal.samples)))
            for d in offsets]
    assert np.all(np.diff(dist) < 0)
    assert dist[-1] < 0.02 * dist[0]


# -- convolve --------------------------------------------------------------------

def test_convolve_with_scaled_delta_is_identity():
    rng = np.random.default_rng(9)
    dt = 1e-9
    s = random_signal(rng, 64, dt)
    h = DenseSignal([1 / dt], dt, 0.0)
    y = sigkit.convolve(h, s)
    assert y.t0 == s.t0
    assert rel_err(y.samples, s.samples) < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_convolve_matches_direct(seed):
    rng = np.random.default_rng(seed)
    h = random_signal(rng, int(rng.integers(1, 1025)), 0.5)
    s = random_signal(rng, int(rng.integers(1, 1025)), 0.5)
    assert rel_err(sigkit.convolve(h, s).samples, direct_convolve(h, s).samples) < 1e-9


def test_convolve_support_adds():
    dt = 1.0
    h = DenseSignal(np.ones(11), dt, 0.0)        # support [0, 10]
    s = DenseSignal(np.ones(6), dt, 3.0)         # support [3, 8]
    y = sigkit.convolve(h, s)
    assert y.t0 == 3.0
    assert y.t_end == pytest.approx(18.0)
    assert abs(y.samples[0]) > 0 and abs(y.samples[-1]) > 0


def test_convolve_grid_mismatch():
    with pytest.raises(GridMismatch):
        sigkit.convolve(DenseSignal([1.0], 1.0), DenseSignal([1.0], 2.0))
