"""Brute-force minimisation for small QUBOs."""

from __future__ import annotations

import numpy as np

from ..polynomial import QuboProblem
from .sampleset import Sample, SampleSet

DEFAULT_MAX_DIMENSION = 24
_LOW_BITS = 14


class ProblemTooLargeError(ValueError):
    pass


def all_states(n: int) -> np.ndarray:
    """Every 0/1 vector of length ``n``; row ``k`` is ``k`` in binary, variable 0 = LSB."""
    k = np.arange(2**n, dtype=np.int64)[:, None]
    return ((k >> np.arange(n)) & 1).astype(np.int8)


def exhaustive_solve(
    q: QuboProblem, max_dimension: int = DEFAULT_MAX_DIMENSION, tol: float = 1e-9
) -> SampleSet:
    """Every global minimiser of ``q`` (ties within ``tol`` relative).

    States are enumerated in blocks: the low variables as a fixed table and
    the high variables in batches, so ``2**n`` energies are never held at once.
    """
    n = q.dimension
    if n > max_dimension:
        raise ProblemTooLargeError(
            f"dimension {n} exceeds exhaustive limit {max_dimension}; raise max_dimension or use simulated annealing"
        )
    if n == 0:
        return SampleSet((Sample((), q.offset, 1),), {"solver": "exhaustive"})
    lo = min(n, _LOW_BITS)
    hi = n - lo
    upper = np.triu(q.coupling_matrix())
    X_lo = all_states(lo).astype(float)
    lin_lo = q.linear[:lo]
    base_lo = X_lo @ lin_lo + np.einsum("ij,ij->i", X_lo @ upper[:lo, :lo], X_lo)
    cross = upper[:lo, lo:]  # couplings low -> high (upper triangle, lo < hi indices)

    best = np.inf
    found: list[tuple[float, tuple[int, ...]]] = []
    batch = max(1, 2**20 // X_lo.shape[0])
    for start in range(0, 2**hi, batch):
        ks = np.arange(start, min(start + batch, 2**hi), dtype=np.int64)
        X_hi = ((ks[:, None] >> np.arange(hi)) & 1).astype(float)
        const_hi = q.offset + X_hi @ q.linear[lo:] + np.einsum("ij,ij->i", X_hi @ upper[lo:, lo:], X_hi)
        # E[a, b] for low state a, high state b
        E = base_lo[:, None] + X_lo @ (cross @ X_hi.T) + const_hi[None, :]
        m = float(E.min())
        if m > best + tol * max(1.0, abs(best)):
            continue
        if m < best:
            best = m
            found = [f for f in found if f[0] <= best + tol * max(1.0, abs(best))]
        cutoff = best + tol * max(1.0, abs(best))
        for a, b in zip(*np.nonzero(E <= cutoff)):
            bits = tuple(X_lo[a].astype(int).tolist()) + tuple(X_hi[b].astype(int).tolist())
            found.append((float(E[a, b]), bits))
    cutoff = best + tol * max(1.0, abs(best))
    records = [Sample(bits, q.energy(bits), 1) for e, bits in found if e <= cutoff]
    return SampleSet.from_records(records, solver="exhaustive")


def exhaustive_inputs_solve(q: QuboProblem, num_inputs: int, max_inputs: int = DEFAULT_MAX_DIMENSION, tol: float = 1e-9) -> SampleSet:
    """Minimise over the first ``num_inputs`` variables, solving the rest exactly per input.

    The remaining variables must not couple to each other (true for the
    auxiliaries produced by :func:`reduce_to_quadratic`), so each one is set
    independently to whichever value lowers the energy.
    """
    n_aux = q.dimension - num_inputs
    if num_inputs > max_inputs:
        raise ProblemTooLargeError(f"{num_inputs} inputs exceed limit {max_inputs}")
    coupling = q.coupling_matrix()
    if n_aux and np.any(coupling[num_inputs:, num_inputs:]):
        raise ValueError("trailing variables are coupled to each other; use exhaustive_solve")
    X = all_states(num_inputs).astype(float)
    upper = np.triu(coupling[:num_inputs, :num_inputs])
    E = q.offset + X @ q.linear[:num_inputs] + np.einsum("ij,ij->i", X @ upper, X)
    if n_aux:
        aux_field = q.linear[num_inputs:][None, :] + X @ coupling[:num_inputs, num_inputs:]
        E = E + np.minimum(aux_field, 0.0).sum(axis=1)
    best = float(E.min())
    idx = np.flatnonzero(E <= best + tol * max(1.0, abs(best)))
    records = []
    for k in idx:
        x = X[k]
        field = q.linear[num_inputs:] + x @ coupling[:num_inputs, num_inputs:] if n_aux else np.zeros(0)
        bits = tuple(x.astype(int).tolist()) + tuple(int(v < 0) for v in field)
        records.append(Sample(bits, q.energy(bits), 1))
    return SampleSet.from_records(records, solver="exhaustive-inputs")
