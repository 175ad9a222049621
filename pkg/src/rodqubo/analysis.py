"""Error norms, admissibility checks and compliance ranking for decoded solutions."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .rod import ForceSolution, RodProblem, analytic_force, enumerate_designs


@dataclass(frozen=True)
class H1ErrorReport:
    l2_component: float
    seminorm_component: float
    relative_h1: float

    def as_dict(self) -> dict:
        return {
            "l2_component": self.l2_component,
            "seminorm_component": self.seminorm_component,
            "relative_h1": self.relative_h1,
        }


def _piecewise_linear_norms(nodes: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Exact squared L2 norm and squared H1 seminorm of a nodal interpolant."""
    h = np.diff(nodes)
    v0, v1 = values[:-1], values[1:]
    l2 = float(np.sum(h / 3.0 * (v0 * v0 + v0 * v1 + v1 * v1)))
    semi = float(np.sum((v1 - v0) ** 2 / h))
    return l2, semi


def h1_relative_error(F: ForceSolution, Fstar: ForceSolution) -> H1ErrorReport:
    """``||F - F*||_H1 / ||F*||_H1`` with unit weights on value and derivative.

    ``l2_component`` and ``seminorm_component`` are the two parts of the
    error norm itself, ``sqrt(int d^2)`` and ``sqrt(int d'^2)``.
    """
    nodes = np.asarray(F.nodes, dtype=float)
    if nodes.shape != (len(Fstar.nodes),) or not np.allclose(nodes, Fstar.nodes, rtol=0, atol=1e-12):
        raise ValueError("solutions are defined on different meshes")
    ref = np.asarray(Fstar.nodal_forces, dtype=float)
    diff = np.asarray(F.nodal_forces, dtype=float) - ref
    l2, semi = _piecewise_linear_norms(nodes, diff)
    ref_l2, ref_semi = _piecewise_linear_norms(nodes, ref)
    denom = math.sqrt(ref_l2 + ref_semi)
    if denom == 0.0:
        raise ValueError("reference solution has zero H1 norm")
    return H1ErrorReport(math.sqrt(l2), math.sqrt(semi), math.sqrt(l2 + semi) / denom)


def admissibility_residual(sol: ForceSolution) -> float:
    """Largest element equilibrium residual in magnitude."""
    return sol.max_residual


def compliance_rank(
    rod: RodProblem, choices: Sequence[float], max_elements: int = 16
) -> list[tuple[tuple[float, ...], float]]:
    """Every area combination with the complementary energy of its exact
    equilibrium force, sorted ascending; the head is the stiffest design."""
    if rod.n_elements > max_elements:
        raise ValueError(f"{rod.n_elements} elements exceed enumeration limit {max_elements}")
    ranked = [(design, analytic_force(rod, design).energy) for design in enumerate_designs(rod, choices)]
    ranked.sort(key=lambda item: (item[1], item[0]))
    return ranked


@dataclass(frozen=True)
class SolutionReport:
    solution: ForceSolution
    reference: ForceSolution | None
    h1: H1ErrorReport | None
    max_residual: float
    rank: int = 0

    def as_dict(self) -> dict:
        return {
            "rank": self.rank,
            "nodal_forces": list(self.solution.nodal_forces),
            "areas": list(self.solution.areas),
            "design_bits": None if self.solution.design_bits is None else list(self.solution.design_bits),
            "residuals": list(self.solution.residuals),
            "max_residual": self.max_residual,
            "energy": self.solution.energy,
            "objective": self.solution.objective,
            "reference_forces": None if self.reference is None else list(self.reference.nodal_forces),
            "h1": None if self.h1 is None else self.h1.as_dict(),
            "h1_error": None if self.h1 is None else self.h1.relative_h1,
        }


def solution_report(sol: ForceSolution, rod: RodProblem, rank: int = 0) -> SolutionReport:
    """Compare ``sol`` with the exact force for its own (decoded) areas."""
    ref = analytic_force(rod, sol.areas)
    return SolutionReport(sol, ref, h1_relative_error(sol, ref), admissibility_residual(sol), rank)


def force_table_csv(sol: ForceSolution, ref: ForceSolution | None = None, midpoints: bool = False) -> str:
    """CSV of ``x, F, F*, F - F*`` at the nodes (and element midpoints if asked)."""
    xs = list(sol.nodes)
    if midpoints:
        xs = sorted(xs + [0.5 * (a + b) for a, b in zip(sol.nodes, sol.nodes[1:])])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if ref is None:
        writer.writerow(["x", "F"])
        writer.writerows([repr(x), repr(float(sol.force(x)))] for x in xs)
    else:
        writer.writerow(["x", "F", "F_ref", "diff"])
        for x in xs:
            f, fr = float(sol.force(x)), float(ref.force(x))
            writer.writerow([repr(x), repr(f), repr(fr), repr(f - fr)])
    return buf.getvalue()
