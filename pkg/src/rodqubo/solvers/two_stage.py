"""Sample at a relaxed penalty weight, then polish at a strict one."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol, Union

from ..polynomial import QuboProblem
from ..rod import AssembledProblem
from .greedy import greedy_descent
from .sampleset import SampleSet


class Sampler(Protocol):
    def sample(self, q: QuboProblem) -> SampleSet: ...


SamplerLike = Union[Sampler, Callable[[QuboProblem], SampleSet]]


def run_sampler(sampler: SamplerLike, q: QuboProblem) -> SampleSet:
    if hasattr(sampler, "sample"):
        return sampler.sample(q)
    return sampler(q)


@dataclass(frozen=True)
class TwoStageConfig:
    lambda_small: float
    lambda_large: float
    reads: int = 500

    def __post_init__(self):
        if not 0 < self.lambda_small <= self.lambda_large:
            raise ValueError("penalty weights must satisfy 0 < lambda_small <= lambda_large")
        if self.reads < 1:
            raise ValueError("reads must be positive")


@dataclass(frozen=True)
class TwoStageResult:
    stage1: SampleSet
    stage2: SampleSet
    relaxed: AssembledProblem
    strict: AssembledProblem

    @property
    def best(self):
        return self.stage2.first


def two_stage_solve(problem: AssembledProblem, cfg: TwoStageConfig, sampler: SamplerLike) -> TwoStageResult:
    """Stage 1 samples the ``lambda_small`` QUBO with ``sampler``; stage 2 runs
    steepest descent on the ``lambda_large`` QUBO from every stage-1 state and
    ranks the results by the ``lambda_large`` objective.

    Auxiliary variables (design problems) are re-derived for the stage-2
    QUBO from each sample's input bits before descending.
    """
    relaxed = problem.with_penalty_weight(cfg.lambda_small)
    strict = problem.with_penalty_weight(cfg.lambda_large)
    stage1 = run_sampler(sampler, relaxed.to_qubo()).relabel(stage="relaxed", penalty_weight=cfg.lambda_small)
    q2 = strict.to_qubo()
    finals, counts = [], []
    for rec in stage1:
        start = strict.complete(rec.bits[: strict.num_inputs])
        finals.append(greedy_descent(q2, start)[0])
        counts.append(rec.count)
    stage2 = SampleSet.from_samples(
        q2,
        finals,
        counts,
        **{**stage1.metadata, "stage": "polished", "penalty_weight": cfg.lambda_large, "polish": "steepest-descent"},
    )
    return TwoStageResult(stage1, stage2, relaxed, strict)
