"""Steepest-descent single-bit-flip local search."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..polynomial import QuboProblem
from .sampleset import SampleSet


def _flip_tolerance(q: QuboProblem) -> np.ndarray:
    # per-variable bound on rounding error of a flip delta
    row = np.abs(q.linear) + np.abs(q.coupling_matrix()).sum(axis=1)
    return 64 * np.finfo(float).eps * row


def greedy_descent(q: QuboProblem, start: Sequence[int]) -> tuple[tuple[int, ...], float]:
    """Repeatedly apply the single flip with the most negative energy change.

    Ties go to the lowest variable index. Stops when no flip lowers the
    energy by more than floating-point noise.
    """
    x = np.array(start, dtype=float)
    if x.shape != (q.dimension,):
        raise ValueError(f"start has shape {x.shape}, expected ({q.dimension},)")
    coupling = q.coupling_matrix()
    tol = _flip_tolerance(q)
    field = q.linear + coupling @ x
    while True:
        delta = (1.0 - 2.0 * x) * field
        i = int(np.argmin(delta))
        if not delta[i] < -tol[i]:
            break
        step = 1.0 - 2.0 * x[i]
        x[i] += step
        field += step * coupling[i]
    bits = tuple(int(v) for v in x)
    return bits, q.energy(bits)


def greedy_polish(q: QuboProblem, starts: SampleSet | Sequence[Sequence[int]], **metadata) -> SampleSet:
    """Descend from every start state; counts of the starts are carried over."""
    if isinstance(starts, SampleSet):
        pairs = [(r.bits, r.count) for r in starts]
    else:
        pairs = [(tuple(s), 1) for s in starts]
    finals = [greedy_descent(q, s)[0] for s, _ in pairs]
    return SampleSet.from_samples(q, finals, [c for _, c in pairs], **metadata)
