"""Energy capture of bandlimited receivers over multipath channels."""
from .candidates import (AcquisitionResult, ChannelCandidate, PenaltyRecord, acquire,
                         extract_candidate, penalty_from_gains, phase_penalty, split_offset,
                         tap_count)
from .chanmodel import CirRecord, ClusterModelParams, export, generate, ingest
from .experiment import PenaltyReport, SweepConfig, emit_report, run_sweep
from .sigkit import (DenseSignal, EffectiveResponse, ImpulseResponse, Spectrum, convolve,
                     dft, energy, idft, ideal_lowpass, sample_at)

__version__ = "0.1.0"
