"""Compound rod under self-weight: complementary-energy objective in binary form.

The rod hangs from ``x = 0`` and is free at ``x = L``. The axial force is
interpolated linearly between nodes; each nodal value ``a_i`` in ``[0, 1]``
is encoded with ``n_q`` bits, and the free-end value is fixed to zero.
Element equilibrium ``(a_{i+1} - a_i) / A_e + dx_e f = 0`` enters as a
quadratic penalty.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .polynomial import (
    PseudoBooleanPolynomial,
    QuboProblem,
    ReductionMap,
    VariableId,
    VariableKind,
    MissingVariableError,
    polynomial_sum,
    reduce_to_quadratic,
)

Poly = PseudoBooleanPolynomial


@dataclass(frozen=True)
class RodProblem:
    """Geometry, material and load of the rod.

    ``youngs_modulus`` may be a scalar or one value per element; ``nodes``
    defaults to a uniform mesh on ``[0, length]``.
    """

    length: float
    n_elements: int
    youngs_modulus: float | Sequence[float] = 1.0
    body_force: float = 1.0
    nodes: Sequence[float] | None = None

    def __post_init__(self):
        if self.n_elements < 1:
            raise ValueError("n_elements must be at least 1")
        if not self.length > 0:
            raise ValueError("length must be positive")
        if not self.body_force > 0:
            raise ValueError("body_force must be positive")
        if self.nodes is None:
            nodes = tuple(float(v) for v in np.linspace(0.0, self.length, self.n_elements + 1))
        else:
            nodes = tuple(float(v) for v in self.nodes)
            if len(nodes) != self.n_elements + 1:
                raise ValueError(f"expected {self.n_elements + 1} node coordinates, got {len(nodes)}")
            if nodes[0] != 0.0 or not math.isclose(nodes[-1], self.length):
                raise ValueError("nodes must start at 0 and end at length")
            if any(b <= a for a, b in zip(nodes, nodes[1:])):
                raise ValueError("node coordinates must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)
        E = self.youngs_modulus
        moduli = (float(E),) * self.n_elements if np.isscalar(E) else tuple(float(v) for v in E)
        if len(moduli) != self.n_elements:
            raise ValueError(f"expected {self.n_elements} Young's moduli, got {len(moduli)}")
        if any(not v > 0 for v in moduli):
            raise ValueError("Young's moduli must be positive")
        object.__setattr__(self, "youngs_modulus", moduli)

    @property
    def n_nodes(self) -> int:
        return self.n_elements + 1

    @property
    def element_lengths(self) -> np.ndarray:
        return np.diff(self.nodes)


@dataclass(frozen=True)
class FixedAreas:
    areas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "areas", tuple(float(a) for a in self.areas))
        if any(not a > 0 for a in self.areas):
            raise ValueError("cross-sectional areas must be positive")


@dataclass(frozen=True)
class DesignableAreas:
    """Two admissible areas per element, selected by one bit: 0 -> first, 1 -> second."""

    choices: tuple[float, float]

    def __post_init__(self):
        c = tuple(float(a) for a in self.choices)
        if len(c) != 2:
            raise ValueError("exactly two area choices are supported")
        if any(not a > 0 for a in c):
            raise ValueError("area choices must be positive")
        if c[0] == c[1]:
            raise ValueError("area choices must differ")
        object.__setattr__(self, "choices", c)

    def area(self, bit: int) -> float:
        return self.choices[int(bit)]


CrossSectionSpec = FixedAreas | DesignableAreas


def fixed_areas(value: float | Sequence[float], n_elements: int) -> FixedAreas:
    if np.isscalar(value):
        return FixedAreas((float(value),) * n_elements)
    if len(value) != n_elements:
        raise ValueError(f"expected {n_elements} areas, got {len(value)}")
    return FixedAreas(tuple(value))


@dataclass(frozen=True)
class CoefficientEncoding:
    """Unsigned fixed-point encoding of a value in ``[0, 1]`` with ``bits`` bits.

    Bit ``l`` (0-based, LSB first) carries weight ``2**l / (2**bits - 1)``.
    """

    bits: int

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("encoding needs at least one bit")

    @property
    def levels(self) -> int:
        return 2**self.bits - 1

    @property
    def step(self) -> float:
        return 1.0 / self.levels

    @property
    def weights(self) -> np.ndarray:
        return 2.0 ** np.arange(self.bits) / self.levels

    def decode(self, bits: Sequence[int]) -> float:
        return decode_coefficient(bits, self.bits)

    def encode_nearest(self, value: float) -> tuple[int, ...]:
        """Bits of the representable value closest to ``value`` (clipped to ``[0, 1]``)."""
        k = int(round(min(max(value, 0.0), 1.0) * self.levels))
        return tuple((k >> l) & 1 for l in range(self.bits))


def decode_coefficient(bits: Sequence[int], n_bits: int | None = None) -> float:
    """Map an LSB-first bit vector to ``sum_l 2**l b_l / (2**n - 1)``."""
    bits = list(bits)
    if n_bits is not None and len(bits) != n_bits:
        raise ValueError(f"expected {n_bits} bits, got {len(bits)}")
    if not bits:
        raise ValueError("empty bit vector")
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"bits must be 0 or 1: {bits}")
    k = sum(int(b) << l for l, b in enumerate(bits))
    return k / (2 ** len(bits) - 1)


@dataclass(frozen=True)
class Registry:
    """Which binary variables encode which quantity.

    Coefficient bits are node-major (node 0 bits first, LSB first within a
    node); the free-end node owns no bits. Design bits follow, one per
    element.
    """

    node_bits: tuple[tuple[int, ...], ...]
    design_bits: tuple[int, ...] | None
    variables: tuple[VariableId, ...]

    @property
    def num_inputs(self) -> int:
        return len(self.variables)


def build_registry(rod: RodProblem, areas: CrossSectionSpec, enc: CoefficientEncoding) -> Registry:
    variables: list[VariableId] = []
    node_bits = []
    for node in range(rod.n_elements):
        ids = []
        for l in range(enc.bits):
            ids.append(len(variables))
            variables.append(VariableId(len(variables), VariableKind.COEFFICIENT, f"a{node}_{l}"))
        node_bits.append(tuple(ids))
    node_bits.append(())
    design_bits = None
    if isinstance(areas, DesignableAreas):
        design_bits = []
        for e in range(rod.n_elements):
            design_bits.append(len(variables))
            variables.append(VariableId(len(variables), VariableKind.DESIGN, f"A{e}"))
        design_bits = tuple(design_bits)
    return Registry(tuple(node_bits), design_bits, tuple(variables))


def _check_areas(rod: RodProblem, areas: CrossSectionSpec) -> None:
    if isinstance(areas, FixedAreas) and len(areas.areas) != rod.n_elements:
        raise ValueError(f"expected {rod.n_elements} areas, got {len(areas.areas)}")


def _nodal_polys(registry: Registry, enc: CoefficientEncoding) -> list[Poly]:
    w = enc.weights
    return [Poly.linear({v: w[l] for l, v in enumerate(bits)}) for bits in registry.node_bits]


def _inverse_area_polys(rod: RodProblem, areas: CrossSectionSpec, registry: Registry) -> list[Poly]:
    if isinstance(areas, FixedAreas):
        return [Poly.constant(1.0 / a) for a in areas.areas]
    inv1, inv2 = (1.0 / a for a in areas.choices)
    return [Poly.linear({q: inv2 - inv1}, inv1) for q in registry.design_bits]


def assemble_internal_energy(rod: RodProblem, areas: CrossSectionSpec, enc: CoefficientEncoding) -> Poly:
    """Complementary strain energy ``sum_e 1/2 int F^2 / (E_e A_e) dx``.

    For a linear interpolant the element integral is exact:
    ``dx / (6 E A) * (a_i^2 + a_i a_{i+1} + a_{i+1}^2)``.
    """
    _check_areas(rod, areas)
    registry = build_registry(rod, areas, enc)
    a = _nodal_polys(registry, enc)
    inv_area = _inverse_area_polys(rod, areas, registry)
    parts = []
    for e, (dx, E) in enumerate(zip(rod.element_lengths, rod.youngs_modulus)):
        ai, aj = a[e], a[e + 1]
        quad = ai * ai + ai * aj + aj * aj
        parts.append(inv_area[e] * quad * (dx / (6.0 * E)))
    return polynomial_sum(parts)


def element_residual_polys(rod: RodProblem, areas: CrossSectionSpec, enc: CoefficientEncoding) -> list[Poly]:
    _check_areas(rod, areas)
    registry = build_registry(rod, areas, enc)
    a = _nodal_polys(registry, enc)
    inv_area = _inverse_area_polys(rod, areas, registry)
    f = rod.body_force
    return [inv_area[e] * (a[e + 1] - a[e]) + dx * f for e, dx in enumerate(rod.element_lengths)]


def assemble_penalty(rod: RodProblem, areas: CrossSectionSpec, enc: CoefficientEncoding) -> Poly:
    """Mean squared equilibrium residual ``(1/n_e) sum_e pi_e^2``."""
    residuals = element_residual_polys(rod, areas, enc)
    return polynomial_sum(r * r for r in residuals).scale(1.0 / rod.n_elements)


@dataclass(frozen=True)
class ForceSolution:
    nodes: tuple[float, ...]
    nodal_forces: tuple[float, ...]
    areas: tuple[float, ...]
    residuals: tuple[float, ...]
    energy: float
    objective: float | None = None
    design_bits: tuple[int, ...] | None = None

    def force(self, x: float | np.ndarray) -> float | np.ndarray:
        """Piecewise-linear force at ``x``."""
        return np.interp(x, self.nodes, self.nodal_forces)

    @property
    def max_residual(self) -> float:
        return max(abs(r) for r in self.residuals)

    def as_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "nodal_forces": list(self.nodal_forces),
            "areas": list(self.areas),
            "design_bits": None if self.design_bits is None else list(self.design_bits),
            "residuals": list(self.residuals),
            "energy": self.energy,
            "objective": self.objective,
        }


def force_energy(rod: RodProblem, areas: Sequence[float], forces: Sequence[float]) -> float:
    total = 0.0
    for e, (dx, E) in enumerate(zip(rod.element_lengths, rod.youngs_modulus)):
        ai, aj = forces[e], forces[e + 1]
        total += dx / (6.0 * E * areas[e]) * (ai * ai + ai * aj + aj * aj)
    return float(total)


def force_residuals(rod: RodProblem, areas: Sequence[float], forces: Sequence[float]) -> tuple[float, ...]:
    return tuple(
        float((forces[e + 1] - forces[e]) / areas[e] + dx * rod.body_force) for e, dx in enumerate(rod.element_lengths)
    )


def make_solution(
    rod: RodProblem,
    areas: Sequence[float],
    forces: Sequence[float],
    penalty_weight: float | None = None,
    design_bits: tuple[int, ...] | None = None,
) -> ForceSolution:
    energy = force_energy(rod, areas, forces)
    residuals = force_residuals(rod, areas, forces)
    objective = None
    if penalty_weight is not None:
        objective = energy + penalty_weight * sum(r * r for r in residuals) / rod.n_elements
    return ForceSolution(
        nodes=tuple(rod.nodes),
        nodal_forces=tuple(float(v) for v in forces),
        areas=tuple(float(a) for a in areas),
        residuals=residuals,
        energy=energy,
        objective=objective,
        design_bits=design_bits,
    )


def analytic_force(rod: RodProblem, areas: FixedAreas | Sequence[float]) -> ForceSolution:
    """Exact equilibrium force ``F(x) = f * int_x^L A dxi`` at the nodes."""
    values = areas.areas if isinstance(areas, FixedAreas) else tuple(float(a) for a in areas)
    if len(values) != rod.n_elements:
        raise ValueError(f"expected {rod.n_elements} areas, got {len(values)}")
    segment = rod.body_force * np.asarray(values) * rod.element_lengths
    tail = np.concatenate([np.cumsum(segment[::-1])[::-1], [0.0]])
    return make_solution(rod, values, tail, penalty_weight=0.0)


@dataclass(frozen=True)
class AssembledProblem:
    """Objective ``J = energy + penalty_weight * penalty`` with its variable registry."""

    rod: RodProblem
    areas: CrossSectionSpec
    encoding: CoefficientEncoding
    penalty_weight: float
    energy: Poly
    penalty: Poly
    objective: Poly
    registry: Registry
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def num_inputs(self) -> int:
        return self.registry.num_inputs

    @property
    def is_design(self) -> bool:
        return isinstance(self.areas, DesignableAreas)

    def reduced(self) -> tuple[QuboProblem, ReductionMap]:
        """QUBO form of the objective (quadratized when the objective is cubic)."""
        if "reduced" not in self._cache:
            self._cache["reduced"] = reduce_to_quadratic(self.objective, self.registry.variables)
        return self._cache["reduced"]

    def to_qubo(self) -> QuboProblem:
        return self.reduced()[0]

    def with_penalty_weight(self, penalty_weight: float) -> AssembledProblem:
        return _combine(self.rod, self.areas, self.encoding, penalty_weight, self.energy, self.penalty, self.registry)

    def encode(self, nodal_forces: Sequence[float], design_bits: Sequence[int] = ()) -> tuple[int, ...]:
        """Input bits for the given nodal forces (rounded to the nearest level)."""
        bits = [0] * self.num_inputs
        for node, ids in enumerate(self.registry.node_bits):
            for v, b in zip(ids, self.encoding.encode_nearest(nodal_forces[node])):
                bits[v] = b
        if self.registry.design_bits is not None:
            if len(design_bits) != len(self.registry.design_bits):
                raise ValueError("one design bit per element is required")
            for v, b in zip(self.registry.design_bits, design_bits):
                bits[v] = int(b)
        return tuple(bits)

    def complete(self, input_bits: Sequence[int]) -> tuple[int, ...]:
        """Extend input bits with the energy-minimising auxiliary values."""
        qubo, rmap = self.reduced()
        if len(input_bits) < self.num_inputs:
            raise MissingVariableError(len(input_bits))
        x = np.zeros(qubo.dimension)
        x[: self.num_inputs] = input_bits[: self.num_inputs]
        coupling = qubo.coupling_matrix()
        for w in rmap.auxiliaries:
            x[w] = 1.0 if qubo.linear[w] + coupling[w] @ x < 0 else 0.0
        return tuple(int(v) for v in x)


def _combine(rod, areas, enc, penalty_weight, energy, penalty, registry) -> AssembledProblem:
    if not penalty_weight >= 0:
        raise ValueError("penalty weight must be non-negative")
    objective = energy + penalty.scale(penalty_weight)
    return AssembledProblem(rod, areas, enc, float(penalty_weight), energy, penalty, objective, registry)


def assemble_objective(
    rod: RodProblem, areas: CrossSectionSpec, enc: CoefficientEncoding, penalty_weight: float
) -> AssembledProblem:
    if not penalty_weight >= 0:
        raise ValueError("penalty weight must be non-negative")
    energy = assemble_internal_energy(rod, areas, enc)
    penalty = assemble_penalty(rod, areas, enc)
    registry = build_registry(rod, areas, enc)
    return _combine(rod, areas, enc, penalty_weight, energy, penalty, registry)


def decode_sample(assembled: AssembledProblem, bits: Sequence[int] | Mapping[int, int]) -> ForceSolution:
    """Decode input bits (auxiliaries, if present, are ignored) into forces and areas."""
    reg = assembled.registry

    def get(v: int) -> int:
        if isinstance(bits, Mapping):
            if v not in bits:
                raise MissingVariableError(v)
            return int(bits[v])
        if v >= len(bits):
            raise MissingVariableError(v)
        return int(bits[v])

    forces = [decode_coefficient([get(v) for v in ids]) if ids else 0.0 for ids in reg.node_bits]
    design = None
    if isinstance(assembled.areas, DesignableAreas):
        design = tuple(get(v) for v in reg.design_bits)
        inv1, inv2 = (1.0 / a for a in assembled.areas.choices)
        # same affine inverse-area map as the objective uses
        areas = [1.0 / (inv1 + (inv2 - inv1) * q) for q in design]
    else:
        areas = list(assembled.areas.areas)
    return make_solution(assembled.rod, areas, forces, assembled.penalty_weight, design)


def enumerate_designs(rod: RodProblem, choices: Sequence[float]):
    """All per-element area combinations, first element varying slowest."""
    return itertools.product(choices, repeat=rod.n_elements)
