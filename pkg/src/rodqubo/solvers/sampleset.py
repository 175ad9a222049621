"""Container for solver output."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..polynomial import QuboProblem


@dataclass(frozen=True)
class Sample:
    bits: tuple[int, ...]
    energy: float
    count: int = 1


@dataclass(frozen=True)
class SampleSet:
    """Distinct samples sorted by ``(energy, bits)`` with occurrence counts.

    ``metadata`` records provenance: solver name, seed, number of reads and
    stage label where applicable.
    """

    samples: tuple[Sample, ...]
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_samples(
        cls,
        q: QuboProblem,
        states: Iterable[Sequence[int]],
        counts: Iterable[int] | None = None,
        **metadata,
    ) -> SampleSet:
        """Aggregate raw states, evaluating each distinct state exactly once."""
        tally: dict[tuple[int, ...], int] = {}
        states = [tuple(int(b) for b in s) for s in states]
        counts = [1] * len(states) if counts is None else list(counts)
        for s, c in zip(states, counts):
            tally[s] = tally.get(s, 0) + int(c)
        records = [Sample(s, q.energy(s), c) for s, c in tally.items()]
        return cls.from_records(records, **metadata)

    @classmethod
    def from_records(cls, records: Iterable[Sample], **metadata) -> SampleSet:
        merged: dict[tuple[int, ...], Sample] = {}
        for r in records:
            if r.bits in merged:
                prev = merged[r.bits]
                r = Sample(r.bits, min(prev.energy, r.energy), prev.count + r.count)
            merged[r.bits] = r
        ordered = sorted(merged.values(), key=lambda r: (r.energy, r.bits))
        return cls(tuple(ordered), dict(metadata))

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    @property
    def first(self) -> Sample:
        if not self.samples:
            raise ValueError("empty sample set")
        return self.samples[0]

    @property
    def lowest_energy(self) -> float:
        return self.first.energy

    @property
    def num_reads(self) -> int:
        return sum(r.count for r in self.samples)

    def states(self) -> np.ndarray:
        return np.array([r.bits for r in self.samples], dtype=np.int8)

    def ground_states(self, tol: float = 1e-9) -> list[tuple[int, ...]]:
        e0 = self.lowest_energy
        cutoff = e0 + tol * max(1.0, abs(e0))
        return [r.bits for r in self.samples if r.energy <= cutoff]

    def verify(self, q: QuboProblem, rel_tol: float = 1e-9) -> None:
        """Raise ``ValueError`` if any stored energy disagrees with ``q``."""
        for r in self.samples:
            e = q.energy(r.bits)
            if abs(e - r.energy) > rel_tol * max(1.0, abs(e)):
                raise ValueError(f"stored energy {r.energy} != {e} for {r.bits}")

    def relabel(self, **metadata) -> SampleSet:
        return SampleSet(self.samples, {**self.metadata, **metadata})

    def to_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "samples": [{"bits": list(r.bits), "energy": r.energy, "count": r.count} for r in self.samples],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> SampleSet:
        records = [Sample(tuple(s["bits"]), float(s["energy"]), int(s["count"])) for s in data["samples"]]
        return cls.from_records(records, **data.get("metadata", {}))
