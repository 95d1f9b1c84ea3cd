"""
Random multipath impulse responses and CIR file I/O.

Realizations follow a cluster-arrival (Saleh-Valenzuela) model: clusters
arrive as a Poisson process of rate ``cluster_rate``, rays inside each
cluster as a Poisson process of rate ``ray_rate``, and the mean ray power
decays as ``exp(-T_c/cluster_decay) * exp(-tau/ray_decay)``.  Ray amplitudes
are circular complex Gaussian.  Rays are placed on the nearest sample of the
dense grid, everything beyond ``target_delay_spread`` is dropped and each
realization is scaled to unit energy.

CIR file format, version 1 (UTF-8 text, LF line endings)::

    #cirv1 ds=<seconds> n=<count>
    #i=<index>
    <time_s>,<re>,<im>
    ...

Times within a record are strictly increasing and lie in ``[0, ds]``.
"""
from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from .errors import DegenerateParams, ParseError, UnsupportedVersion
from .sigkit import DenseSignal, ImpulseResponse, energy

DEFAULT_OVERSAMPLE = 16
DEFAULT_MAX_BANDWIDTH = 1024e6
DEFAULT_GRID_STEP = 1.0 / (DEFAULT_OVERSAMPLE * DEFAULT_MAX_BANDWIDTH)
FORMAT_VERSION = 1


@dataclass(frozen=True)
class ClusterModelParams:
    """Cluster model parameters; defaults are residential-LOS-like magnitudes."""

    cluster_rate: float = 0.047e9     # 1/s
    ray_rate: float = 1.54e9          # 1/s
    cluster_decay: float = 22.6e-9    # s
    ray_decay: float = 12.5e-9        # s
    target_delay_spread: float = 279e-9
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("cluster_rate", "ray_rate", "cluster_decay", "ray_decay",
                     "target_delay_spread"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise DegenerateParams(f"{name} must be positive, got {value}")


@dataclass(eq=False)
class CirRecord:
    id: int
    response: ImpulseResponse
    meta: Dict = field(default_factory=dict)


def _support_grid(delay_spread: float, grid_step: float) -> int:
    # number of grid samples with t in [0, delay_spread]
    return int(math.floor(delay_spread / grid_step + 1e-9)) + 1


def _normalized(samples: np.ndarray, grid_step: float, delay_spread: float) -> ImpulseResponse:
    sig = DenseSignal(samples, grid_step, 0.0)
    e = energy(sig)
    if e == 0:
        raise DegenerateParams("realization has zero energy")
    return ImpulseResponse(sig.with_samples(samples / math.sqrt(e)), delay_spread)


def _arrivals(rng: np.random.Generator, rate: float, horizon: float) -> np.ndarray:
    """Arrival times in ``(0, horizon]`` of a Poisson process of the given rate."""
    mean = rate * horizon
    chunk = int(mean + 6 * math.sqrt(mean) + 16)
    times = np.cumsum(rng.exponential(1.0 / rate, chunk))
    while times[-1] <= horizon:
        more = times[-1] + np.cumsum(rng.exponential(1.0 / rate, chunk))
        times = np.concatenate([times, more])
    return times[:np.searchsorted(times, horizon, side="right")]


def realization(params: ClusterModelParams, index: int,
                grid_step: float = DEFAULT_GRID_STEP) -> CirRecord:
    """Draw realization ``index``; depends only on ``(params.rng_seed, index)``."""
    ds = params.target_delay_spread
    rng = np.random.default_rng([params.rng_seed, index])

    clusters = np.concatenate([[0.0], _arrivals(rng, params.cluster_rate, ds)])
    delays, powers = [], []
    for tc in clusters:
        rays = np.concatenate([[0.0], _arrivals(rng, params.ray_rate, ds - tc)])
        delays.append(tc + rays)
        powers.append(np.exp(-tc / params.cluster_decay) * np.exp(-rays / params.ray_decay))
    delays = np.concatenate(delays)
    powers = np.concatenate(powers)
    amps = np.sqrt(powers / 2) * (rng.standard_normal(delays.size)
                                  + 1j * rng.standard_normal(delays.size))

    n = _support_grid(ds, grid_step)
    idx = np.minimum(np.rint(delays / grid_step).astype(np.int64), n - 1)
    samples = np.zeros(n, dtype=complex)
    np.add.at(samples, idx, amps)
    response = _normalized(samples, grid_step, ds)
    meta = {"generator": "cluster", "seed": params.rng_seed, "clusters": len(clusters),
            "rays": int(delays.size)}
    return CirRecord(index, response, meta)


def generate(params: ClusterModelParams, count: int, grid_step: float = DEFAULT_GRID_STEP,
             start: int = 0) -> List[CirRecord]:
    """Generate ``count`` realizations with indices ``start .. start+count-1``.

    Raises
    ------
    DegenerateParams
        If fewer than one ray per cluster is expected within the delay spread.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if params.ray_rate * params.target_delay_spread < 1:
        raise DegenerateParams(
            "expected number of ray arrivals in [0, Ds] is below one "
            f"(ray_rate * Ds = {params.ray_rate * params.target_delay_spread:.3g})")
    if grid_step >= params.target_delay_spread:
        raise DegenerateParams("grid step must be finer than the delay spread")
    return [realization(params, i, grid_step) for i in range(start, start + count)]


# -- file I/O ------------------------------------------------------------------

def export(records: Sequence[CirRecord], path) -> None:
    """Write ``records`` in CIR format v1; only nonzero taps are stored."""
    if not records:
        raise ValueError("nothing to export")
    ds = records[0].response.delay_spread
    lines = [f"#cirv{FORMAT_VERSION} ds={ds!r} n={len(records)}"]
    for rec in records:
        sig = rec.response.signal
        lines.append(f"#i={rec.id}")
        nz = np.flatnonzero(sig.samples)
        for k in nz:
            v = sig.samples[k]
            lines.append(f"{float(sig.t0 + k * sig.grid_step)!r},{float(v.real)!r},{float(v.imag)!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


_HEADER = re.compile(r"^#cirv(\d+)((?:\s+\S+)*)\s*$")


def _parse_header(line: str):
    m = _HEADER.match(line)
    if not m:
        raise ParseError("expected '#cirv1 ds=<seconds> n=<count>' header", 1, 1)
    version = int(m.group(1))
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"CIR file version {version} is not supported")
    fields = {}
    for tok in re.finditer(r"\S+", line[m.start(2):]):
        token, col = tok.group(), m.start(2) + tok.start() + 1
        key, sep, value = token.partition("=")
        if not sep:
            raise ParseError(f"malformed header field {token!r}", 1, col)
        fields[key] = (value, col)
    try:
        ds_txt, ds_col = fields["ds"]
        n_txt, n_col = fields["n"]
    except KeyError as exc:
        raise ParseError(f"header lacks field {exc.args[0]!r}", 1, 1) from None
    try:
        ds = float(ds_txt)
    except ValueError:
        raise ParseError(f"bad delay spread {ds_txt!r}", 1, ds_col) from None
    if not (np.isfinite(ds) and ds > 0):
        raise ParseError("delay spread must be positive", 1, ds_col)
    try:
        count = int(n_txt)
    except ValueError:
        raise ParseError(f"bad record count {n_txt!r}", 1, n_col) from None
    if count < 0:
        raise ParseError("record count must be nonnegative", 1, n_col)
    return ds, count


def _parse_float(text: str, lineno: int, col: int, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"bad {what} {text.strip()!r}", lineno, col) from None
    if not np.isfinite(value):
        raise ParseError(f"{what} must be finite", lineno, col)
    return value


def ingest(path, grid_step: float = DEFAULT_GRID_STEP) -> List[CirRecord]:
    """Read a CIR v1 file onto the dense grid.

    Each tap lands on its nearest grid sample (taps sharing a sample add up).
    Taps later than the declared delay spread are dropped, then every record
    is scaled to unit energy.

    Raises
    ------
    ParseError
        With the 1-based line and column of the first offending field.
    UnsupportedVersion
        For a version other than 1.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty file", 1, 1)
    ds, count = _parse_header(lines[0].rstrip("\r"))

    raw = []   # (index, line of header, [(t, re, im)])
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        if line.startswith("#"):
            m = re.fullmatch(r"#i=(-?\d+)\s*", line)
            if not m:
                raise ParseError("expected record header '#i=<index>'", lineno, 1)
            raw.append((int(m.group(1)), lineno, []))
            continue
        if not raw:
            raise ParseError("tap line before the first record header", lineno, 1)
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(f"expected 3 comma-separated fields, got {len(parts)}", lineno, 1)
        cols = [1, len(parts[0]) + 2, len(parts[0]) + len(parts[1]) + 3]
        t = _parse_float(parts[0], lineno, cols[0], "time")
        re_ = _parse_float(parts[1], lineno, cols[1], "real part")
        im = _parse_float(parts[2], lineno, cols[2], "imaginary part")
        if t < 0:
            raise ParseError(f"negative time {t!r}", lineno, cols[0])
        taps = raw[-1][2]
        if taps and t <= taps[-1][0]:
            raise ParseError("times must be strictly increasing", lineno, cols[0])
        taps.append((t, re_, im))

    if len(raw) != count:
        raise ParseError(f"header declares {count} records, found {len(raw)}", 1, 1)

    n = _support_grid(ds, grid_step)
    records = []
    for index, lineno, taps in raw:
        kept = [tap for tap in taps if tap[0] <= ds]
        if not kept:
            raise ParseError(f"record {index} has no taps within [0, ds]", lineno, 1)
        arr = np.asarray(kept, dtype=float)
        idx = np.minimum(np.rint(arr[:, 0] / grid_step).astype(np.int64), n - 1)
        samples = np.zeros(n, dtype=complex)
        np.add.at(samples, idx, arr[:, 1] + 1j * arr[:, 2])
        if not np.any(samples):
            raise ParseError(f"record {index} has zero energy", lineno, 1)
        response = _normalized(samples, grid_step, ds)
        records.append(CirRecord(index, response, {"source": os.fspath(path)}))
    return records
