"""
Seeded Monte-Carlo sweep over bandwidths and the penalty report.

For every realization ``i`` and bandwidth ``W`` the response is lowpass
filtered, a small offset ``eps ~ U[0, T/M)`` is drawn, the acquired gain is
computed at the ``M`` phases ``eps + m T / M`` and the realization's penalty
is ``1 - min/max`` of those gains.  Per bandwidth the report keeps the
worst case and the mean over realizations.

All randomness comes from substreams keyed by ``(master_seed, i)`` for the
channel and ``(master_seed, i, W)`` for ``eps``, so results do not depend
on the number of worker processes.
"""
from __future__ import annotations

import csv
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from . import sigkit
from .candidates import DEFAULT_PHASES, PenaltyRecord, phase_gains, tap_count
from .chanmodel import DEFAULT_OVERSAMPLE, ClusterModelParams, generate, ingest
from .errors import ConfigError
from .sigkit import ideal_lowpass

TABLE_LADDER = tuple(4e6 * 2.0 ** k for k in range(9))

_EPS_STREAM = 1  # domain tag separating eps draws from channel draws


@dataclass
class SweepConfig:
    bandwidths: Sequence[float] = TABLE_LADDER
    realizations: Optional[int] = 100
    master_seed: int = 7
    M: int = DEFAULT_PHASES
    oversample: int = DEFAULT_OVERSAMPLE
    Ds: float = 279e-9
    source: Union[ClusterModelParams, str, os.PathLike, None] = None
    output_path: Optional[Union[str, os.PathLike]] = None
    fixed_eps: bool = False
    workers: int = 1

    def validate(self):
        bw = [float(w) for w in self.bandwidths]
        if any(not (np.isfinite(w) and w > 0) for w in bw):
            raise ConfigError("bandwidths must be positive")
        if any(b <= a for a, b in zip(bw, bw[1:])):
            raise ConfigError("bandwidths must be strictly ascending")
        if self.realizations is not None and self.realizations < 1:
            raise ConfigError("realizations must be at least 1")
        if self.M < 2:
            raise ConfigError("need at least two phases")
        if self.oversample < 2:
            raise ConfigError("oversample must be at least 2 (bandwidth up to half the grid rate)")
        if not self.Ds > 0:
            raise ConfigError("Ds must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")

    @property
    def grid_step(self) -> float:
        top = max(self.bandwidths) if len(self.bandwidths) else TABLE_LADDER[-1]
        return 1.0 / (self.oversample * top)


@dataclass
class BandwidthResult:
    bandwidth: float
    L: int
    records: List[PenaltyRecord] = field(default_factory=list)

    @property
    def penalties(self) -> np.ndarray:
        return np.array([r.max_penalty for r in self.records])

    @property
    def P_max(self) -> float:
        return float(self.penalties.max()) if self.records else float("nan")

    @property
    def P_mean(self) -> float:
        return float(self.penalties.mean()) if self.records else float("nan")


@dataclass
class PenaltyReport:
    rows: List[BandwidthResult]
    M: int = DEFAULT_PHASES

    @property
    def bandwidths(self):
        return [r.bandwidth for r in self.rows]

    @property
    def L(self):
        return [r.L for r in self.rows]

    @property
    def P_max(self):
        return [r.P_max for r in self.rows]

    @property
    def P_mean(self):
        return [r.P_mean for r in self.rows]


def eps_fraction(master_seed: int, realization: int, bandwidth: float, fixed: bool = False) -> float:
    """Uniform variate in [0, 1) for the small offset; scaled by T/M by the caller."""
    key = [master_seed, _EPS_STREAM, realization]
    if not fixed:
        key.append(int(round(bandwidth)))
    return float(np.random.default_rng(key).random())


def _load_channels(cfg: SweepConfig):
    dt = cfg.grid_step
    src = cfg.source
    if src is None or isinstance(src, ClusterModelParams):
        params = src or ClusterModelParams()
        params = ClusterModelParams(params.cluster_rate, params.ray_rate, params.cluster_decay,
                                    params.ray_decay, cfg.Ds, cfg.master_seed)
        return generate(params, cfg.realizations or 100, grid_step=dt)
    records = ingest(src, grid_step=dt)
    if cfg.realizations is not None:
        if cfg.realizations > len(records):
            raise ConfigError(f"file holds {len(records)} records, {cfg.realizations} requested")
        records = records[:cfg.realizations]
    return records


def _realization_task(args):
    record, bandwidths, M, seed, fixed = args
    h = record.response
    if bandwidths:
        h = sigkit.pad(h, bandwidths[0])
    out = []
    for W in bandwidths:
        hT = ideal_lowpass(h, W)
        eps = eps_fraction(seed, record.id, W, fixed) * (1.0 / W) / M
        out.append(PenaltyRecord(record.id, phase_gains(hT, eps, M), eps))
    return out


def run_sweep(cfg: SweepConfig) -> PenaltyReport:
    cfg.validate()
    bandwidths = [float(w) for w in cfg.bandwidths]
    rows = [BandwidthResult(W, tap_count(cfg.Ds, W)) for W in bandwidths]
    if not bandwidths:
        return PenaltyReport(rows, cfg.M)
    records = _load_channels(cfg)
    tasks = [(rec, bandwidths, cfg.M, cfg.master_seed, cfg.fixed_eps) for rec in records]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_realization_task, tasks))
    else:
        results = [_realization_task(t) for t in tasks]
    for per_w in results:
        for row, rec in zip(rows, per_w):
            row.records.append(rec)
    return PenaltyReport(rows, cfg.M)


# -- output --------------------------------------------------------------------

def _num(x: float) -> str:
    return repr(float(x))


def aggregate_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + "_aggregate" + (path.suffix or ".csv"))


def records_csv(report: PenaltyReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bandwidth_hz", "L", "realization", "eps_s"]
               + [f"g_m{m}" for m in range(report.M)] + ["penalty"])
    for row in report.rows:
        for rec in row.records:
            w.writerow([_num(row.bandwidth), row.L, rec.realization, _num(rec.eps)]
                       + [_num(g) for g in rec.gains] + [_num(rec.max_penalty)])
    return buf.getvalue()


def aggregate_csv(report: PenaltyReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bandwidth_hz", "L", "P_max", "P_mean"])
    for row in report.rows:
        w.writerow([_num(row.bandwidth), row.L, _num(row.P_max), _num(row.P_mean)])
    return buf.getvalue()


def summary_table(report: PenaltyReport) -> str:
    """Bandwidths as columns; penalties in percent with one decimal."""
    head = ["W [MHz]"] + [f"{w / 1e6:g}" for w in report.bandwidths]
    pmax = ["P [%]"] + [f"{100 * p:.1f}" for p in report.P_max]
    pmean = ["P_mean [%]"] + [f"{100 * p:.1f}" for p in report.P_mean]
    taps = ["L"] + [str(n) for n in report.L]
    table = [head, pmax, pmean, taps]
    widths = [max(len(r[c]) for r in table) for c in range(len(head))]
    lines = []
    for r in table:
        first = r[0].ljust(widths[0])
        rest = " ".join(cell.rjust(widths[c + 1]) for c, cell in enumerate(r[1:]))
        lines.append(f"{first} | {rest}".rstrip())
    return "\n".join(lines)


def emit_report(report: PenaltyReport, path, stream=None) -> Path:
    """Write the per-realization CSV to ``path`` and the aggregate next to it.

    The aggregate goes to ``<stem>_aggregate<suffix>``.  The summary table is
    printed to ``stream`` (stdout by default; pass False to suppress).
    """
    path = Path(path)
    path.write_text(records_csv(report), encoding="utf-8")
    aggregate_path(path).write_text(aggregate_csv(report), encoding="utf-8")
    if stream is not False:
        print(summary_table(report), file=stream or sys.stdout)
    return path


def parse_bandwidths(text: str) -> List[float]:
    """Parse ``a..bxk`` (geometric ladder with factor k) or a comma list."""
    text = text.strip()
    if not text:
        return []
    if ".." in text:
        try:
            lo, rest = text.split("..", 1)
            hi, factor = rest.split("x", 1)
            lo, hi, factor = float(lo), float(hi), float(factor)
        except ValueError:
            raise ConfigError(f"bad bandwidth ladder {text!r}; expected a..bxk") from None
        if not (lo > 0 and hi >= lo and factor > 1):
            raise ConfigError(f"bad bandwidth ladder {text!r}")
        out = []
        while lo * factor ** len(out) <= hi * (1 + 1e-9):
            out.append(lo * factor ** len(out))
        return out
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"bad bandwidth list {text!r}") from None
