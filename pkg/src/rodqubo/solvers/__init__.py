from .annealing import AnnealConfig, SimulatedAnnealingSampler, simulated_annealing
from .exhaustive import ProblemTooLargeError, exhaustive_inputs_solve, exhaustive_solve
from .greedy import greedy_descent, greedy_polish
from .remote import (
    EnergyMismatchError,
    MalformedResponseError,
    MockSamplerServer,
    RemoteSampler,
    RemoteSamplerError,
    RemoteTimeoutError,
    RemoteTransportError,
    remote_sample,
)
from .sampleset import Sample, SampleSet
from .two_stage import TwoStageConfig, TwoStageResult, two_stage_solve

__all__ = [
    "AnnealConfig",
    "EnergyMismatchError",
    "MalformedResponseError",
    "MockSamplerServer",
    "ProblemTooLargeError",
    "RemoteSampler",
    "RemoteSamplerError",
    "RemoteTimeoutError",
    "RemoteTransportError",
    "Sample",
    "SampleSet",
    "SimulatedAnnealingSampler",
    "TwoStageConfig",
    "TwoStageResult",
    "exhaustive_inputs_solve",
    "exhaustive_solve",
    "greedy_descent",
    "greedy_polish",
    "remote_sample",
    "simulated_annealing",
    "two_stage_solve",
]
