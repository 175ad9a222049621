"""Multilinear pseudo-Boolean polynomials and their reduction to QUBO form.

Energy convention used throughout the package::

    E(x) = sum_i linear[i] * x_i + sum_{i<j} quadratic[i, j] * x_i * x_j + offset

with x_i in {0, 1}.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

#: Terms whose coefficient magnitude drops below this are discarded.
ZERO_TOL = 1e-12


class VariableKind(enum.Enum):
    COEFFICIENT = "coefficient-bit"
    DESIGN = "design-bit"
    AUXILIARY = "auxiliary"


@dataclass(frozen=True, order=True)
class VariableId:
    index: int
    kind: VariableKind = field(default=VariableKind.COEFFICIENT, compare=False)
    name: str = field(default="", compare=False)

    def label(self) -> str:
        return self.name or f"x{self.index}"


def check_registry(variables: Sequence[VariableId]) -> None:
    """Raise ``ValueError`` unless ``variables`` is a valid ordered registry.

    Indices must be exactly ``0..n-1`` and the kinds must form contiguous
    blocks in the order coefficient bits, design bits, auxiliaries.
    """
    order = [VariableKind.COEFFICIENT, VariableKind.DESIGN, VariableKind.AUXILIARY]
    last = 0
    for pos, var in enumerate(variables):
        if var.index != pos:
            raise ValueError(f"registry position {pos} holds index {var.index}")
        rank = order.index(var.kind)
        if rank < last:
            raise ValueError(f"variable {var.label()} ({var.kind.value}) is out of block order")
        last = rank


class Monomial(NamedTuple):
    variables: tuple[int, ...]
    coefficient: float


class MissingVariableError(KeyError):
    """An assignment does not provide a value for a required variable."""

    def __init__(self, index: int):
        super().__init__(index)
        self.index = index

    def __str__(self) -> str:
        return f"assignment has no value for variable {self.index}"


class UnsupportedDegreeError(ValueError):
    pass


def _lookup(x, index: int) -> int:
    if isinstance(x, Mapping):
        try:
            return x[index]
        except KeyError:
            raise MissingVariableError(index) from None
    if index >= len(x):
        raise MissingVariableError(index)
    return x[index]


class PseudoBooleanPolynomial:
    """Multilinear polynomial over binary variables, kept in canonical form.

    Terms are stored as ``{sorted variable tuple: coefficient}``; the empty
    tuple is never stored, the constant lives in :attr:`offset`. Instances
    are treated as immutable: every operation returns a new polynomial.
    """

    __slots__ = ("_terms", "_offset")

    def __init__(self, terms: Mapping[Iterable[int], float] | None = None, offset: float = 0.0):
        acc: dict[tuple[int, ...], float] = {}
        off = float(offset)
        for key, coeff in (terms or {}).items():
            key = tuple(sorted(set(key)))
            if not key:
                off += coeff
                continue
            if any(i < 0 for i in key):
                raise ValueError(f"negative variable index in term {key}")
            acc[key] = acc.get(key, 0.0) + float(coeff)
        self._terms = {k: v for k, v in acc.items() if abs(v) >= ZERO_TOL}
        self._offset = off if abs(off) >= ZERO_TOL else 0.0

    @classmethod
    def variable(cls, index: int, coefficient: float = 1.0) -> PseudoBooleanPolynomial:
        return cls({(index,): coefficient})

    @classmethod
    def constant(cls, value: float) -> PseudoBooleanPolynomial:
        return cls(offset=value)

    @classmethod
    def linear(cls, coefficients: Mapping[int, float], offset: float = 0.0) -> PseudoBooleanPolynomial:
        return cls({(i,): c for i, c in coefficients.items()}, offset)

    @property
    def terms(self) -> Mapping[tuple[int, ...], float]:
        return MappingProxyType(self._terms)

    @property
    def offset(self) -> float:
        return self._offset

    @property
    def degree(self) -> int:
        return max((len(k) for k in self._terms), default=0)

    @property
    def variables(self) -> frozenset[int]:
        return frozenset(i for key in self._terms for i in key)

    @property
    def num_variables(self) -> int:
        """One past the largest variable index (0 for a constant)."""
        return max(self.variables, default=-1) + 1

    def monomials(self) -> Iterator[Monomial]:
        for key in sorted(self._terms, key=lambda k: (len(k), k)):
            yield Monomial(key, self._terms[key])

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, float)):
            other = PseudoBooleanPolynomial.constant(other)
        if not isinstance(other, PseudoBooleanPolynomial):
            return NotImplemented
        return self._terms == other._terms and self._offset == other._offset

    def isclose(self, other: PseudoBooleanPolynomial, rel_tol: float = 1e-12, abs_tol: float = 1e-12) -> bool:
        """Coefficient-wise comparison with floating tolerance."""
        keys = set(self._terms) | set(other._terms)
        pairs = [(self._terms.get(k, 0.0), other._terms.get(k, 0.0)) for k in keys]
        pairs.append((self._offset, other._offset))
        return all(math.isclose(a, b, rel_tol=rel_tol, abs_tol=abs_tol) for a, b in pairs)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        parts = [f"{c:+g}*" + "*".join(f"x{i}" for i in k) for k, c in self.monomials()]
        if self._offset or not parts:
            parts.append(f"{self._offset:+g}")
        return f"PseudoBooleanPolynomial({' '.join(parts)})"

    def _coerce(self, other) -> PseudoBooleanPolynomial:
        if isinstance(other, PseudoBooleanPolynomial):
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return PseudoBooleanPolynomial.constant(float(other))
        return NotImplemented

    def __add__(self, other) -> PseudoBooleanPolynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for key, coeff in other._terms.items():
            terms[key] = terms.get(key, 0.0) + coeff
        return PseudoBooleanPolynomial(terms, self._offset + other._offset)

    __radd__ = __add__

    def __neg__(self) -> PseudoBooleanPolynomial:
        return self.scale(-1.0)

    def __sub__(self, other) -> PseudoBooleanPolynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> PseudoBooleanPolynomial:
        return (-self) + other

    def scale(self, factor: float) -> PseudoBooleanPolynomial:
        factor = float(factor)
        return PseudoBooleanPolynomial({k: v * factor for k, v in self._terms.items()}, self._offset * factor)

    def __mul__(self, other) -> PseudoBooleanPolynomial:
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self.scale(other)
        if not isinstance(other, PseudoBooleanPolynomial):
            return NotImplemented
        # idempotence x*x = x: the product key is the union of the variable sets
        terms: dict[tuple[int, ...], float] = {}
        left = list(self._terms.items()) + ([((), self._offset)] if self._offset else [])
        right = list(other._terms.items()) + ([((), other._offset)] if other._offset else [])
        for ka, ca in left:
            for kb, cb in right:
                key = ka if ka == kb else tuple(sorted(set(ka) | set(kb)))
                terms[key] = terms.get(key, 0.0) + ca * cb
        return PseudoBooleanPolynomial(terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> PseudoBooleanPolynomial:
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = PseudoBooleanPolynomial.constant(1.0)
        for _ in range(exponent):
            result = result * self
        return result

    def evaluate(self, x: Sequence[int] | Mapping[int, int]) -> float:
        """Evaluate at a bit assignment given as a sequence or ``{index: bit}``."""
        total = self._offset
        for key, coeff in self._terms.items():
            if all(_lookup(x, i) for i in key):
                total += coeff
        return total

    def __call__(self, x) -> float:
        return self.evaluate(x)


def polynomial_sum(polys: Iterable[PseudoBooleanPolynomial]) -> PseudoBooleanPolynomial:
    terms: dict[tuple[int, ...], float] = {}
    offset = 0.0
    for p in polys:
        offset += p.offset
        for key, coeff in p.terms.items():
            terms[key] = terms.get(key, 0.0) + coeff
    return PseudoBooleanPolynomial(terms, offset)


class QuboProblem:
    """Quadratic binary objective in upper-triangular sparse form.

    Args:
        dimension: number of binary variables.
        linear: per-variable coefficients, length ``dimension``.
        quadratic: mapping ``(i, j) -> value``; keys are normalised to
            ``i < j`` and duplicate orientations are summed.
        offset: constant term.
        variables: optional registry describing each variable.
    """

    def __init__(
        self,
        dimension: int,
        linear: Sequence[float] | np.ndarray | None = None,
        quadratic: Mapping[tuple[int, int], float] | None = None,
        offset: float = 0.0,
        variables: Sequence[VariableId] | None = None,
    ):
        if dimension < 0:
            raise ValueError("dimension must be non-negative")
        lin = np.zeros(dimension) if linear is None else np.asarray(linear, dtype=float).copy()
        if lin.shape != (dimension,):
            raise ValueError(f"linear must have length {dimension}, got shape {lin.shape}")
        quad: dict[tuple[int, int], float] = {}
        for (i, j), v in (quadratic or {}).items():
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-pair ({i}, {i}) in quadratic part; fold it into linear")
            if not (0 <= i < dimension and 0 <= j < dimension):
                raise ValueError(f"pair ({i}, {j}) out of range for dimension {dimension}")
            key = (i, j) if i < j else (j, i)
            quad[key] = quad.get(key, 0.0) + float(v)
        lin[np.abs(lin) < ZERO_TOL] = 0.0
        lin.setflags(write=False)
        self.dimension = dimension
        self.linear = lin
        self.quadratic: Mapping[tuple[int, int], float] = MappingProxyType(
            {k: quad[k] for k in sorted(quad) if abs(quad[k]) >= ZERO_TOL}
        )
        self.offset = float(offset)
        if variables is None:
            variables = [VariableId(i) for i in range(dimension)]
        if len(variables) != dimension:
            raise ValueError("variable registry length does not match dimension")
        self.variables: tuple[VariableId, ...] = tuple(variables)
        self._coupling: np.ndarray | None = None

    @classmethod
    def from_polynomial(
        cls, p: PseudoBooleanPolynomial, dimension: int | None = None, variables: Sequence[VariableId] | None = None
    ) -> QuboProblem:
        if p.degree > 2:
            raise UnsupportedDegreeError(f"polynomial has degree {p.degree}; reduce it first")
        n = p.num_variables if dimension is None else dimension
        if variables is not None and dimension is None:
            n = len(variables)
        linear = np.zeros(n)
        quadratic = {}
        for key, coeff in p.terms.items():
            if len(key) == 1:
                linear[key[0]] += coeff
            else:
                quadratic[key] = coeff
        return cls(n, linear, quadratic, p.offset, variables)

    def to_polynomial(self) -> PseudoBooleanPolynomial:
        terms = {(i,): v for i, v in enumerate(self.linear) if v}
        terms.update(self.quadratic)
        return PseudoBooleanPolynomial(terms, self.offset)

    @property
    def variable_names(self) -> list[str]:
        return [v.label() for v in self.variables]

    def coupling_matrix(self) -> np.ndarray:
        """Symmetric matrix ``C`` with zero diagonal, ``C[i, j] = quadratic[i, j]``."""
        if self._coupling is None:
            c = np.zeros((self.dimension, self.dimension))
            for (i, j), v in self.quadratic.items():
                c[i, j] = v
                c[j, i] = v
            c.setflags(write=False)
            self._coupling = c
        return self._coupling

    def upper_matrix(self) -> np.ndarray:
        """Upper-triangular matrix ``Q`` with ``E(x) = x^T Q x + offset``."""
        q = np.triu(self.coupling_matrix())
        q[np.diag_indices(self.dimension)] = self.linear
        return q

    def neighbors(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per-variable ``(neighbour indices, coupling weights)``."""
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.dimension)]
        for (i, j), v in self.quadratic.items():
            adj[i].append((j, v))
            adj[j].append((i, v))
        out = []
        for row in adj:
            row.sort()
            out.append((np.array([j for j, _ in row], dtype=np.intp), np.array([v for _, v in row], dtype=float)))
        return out

    def energy(self, x) -> float:
        x = self._as_bits(x)
        total = self.offset + float(self.linear @ x)
        for (i, j), v in self.quadratic.items():
            if x[i] and x[j]:
                total += v
        return total

    def energies(self, samples) -> np.ndarray:
        """Vectorised energy of each row of a ``(m, dimension)`` 0/1 array."""
        X = np.asarray(samples, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.dimension:
            raise ValueError(f"samples have {X.shape[1]} columns, expected {self.dimension}")
        upper = np.triu(self.coupling_matrix())
        return self.offset + X @ self.linear + np.einsum("ij,ij->i", X @ upper, X)

    def local_fields(self, x) -> np.ndarray:
        """``linear + C x``; flipping bit i changes the energy by ``(1 - 2 x_i) * field_i``."""
        return self.linear + self.coupling_matrix() @ self._as_bits(x)

    def flip_deltas(self, x) -> np.ndarray:
        x = self._as_bits(x)
        return (1.0 - 2.0 * x) * self.local_fields(x)

    def _as_bits(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        if arr.shape != (self.dimension,):
            raise ValueError(f"assignment has shape {arr.shape}, expected ({self.dimension},)")
        return arr

    def scaled(self, factor: float) -> QuboProblem:
        return QuboProblem(
            self.dimension,
            self.linear * factor,
            {k: v * factor for k, v in self.quadratic.items()},
            self.offset * factor,
            self.variables,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuboProblem):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and np.array_equal(self.linear, other.linear)
            and dict(self.quadratic) == dict(other.quadratic)
            and self.offset == other.offset
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"QuboProblem(dimension={self.dimension}, couplers={len(self.quadratic)}, offset={self.offset:g})"


class ReductionIdentity(enum.Enum):
    KZFD = "KZFD"
    ISHIKAWA = "Ishikawa"


@dataclass(frozen=True)
class Reduction:
    auxiliary: VariableId
    monomial: Monomial
    identity: ReductionIdentity


@dataclass(frozen=True)
class ReductionMap:
    reductions: tuple[Reduction, ...] = ()
    num_inputs: int = 0

    def __len__(self) -> int:
        return len(self.reductions)

    def __iter__(self):
        return iter(self.reductions)

    @property
    def auxiliaries(self) -> list[int]:
        return [r.auxiliary.index for r in self.reductions]

    def count(self, identity: ReductionIdentity) -> int:
        return sum(r.identity is identity for r in self.reductions)


def reduce_to_quadratic(
    p: PseudoBooleanPolynomial,
    variables: Sequence[VariableId] | None = None,
) -> tuple[QuboProblem, ReductionMap]:
    """Quadratize a polynomial of degree at most three.

    Every cubic monomial gets its own auxiliary variable ``w``:

    * ``a < 0``: ``a*xyz = min_w a*w*(x + y + z - 2)``
    * ``a > 0``: ``a*xyz = min_w a*(w*(1 - x - y - z) + xy + xz + yz)``

    Quadratic and lower terms are carried over unchanged. Auxiliaries are
    appended after the input variables, so for any input assignment the
    minimum of the returned QUBO over the auxiliaries equals ``p``.

    Args:
        p: polynomial to reduce.
        variables: registry for the input variables. Its length fixes the
            number of inputs; defaults to ``p.num_variables`` coefficient bits.

    Raises:
        UnsupportedDegreeError: if ``p`` has a term of degree four or more.
    """
    if p.degree > 3:
        raise UnsupportedDegreeError(f"cannot reduce degree {p.degree}; at most cubic terms are supported")
    if variables is None:
        variables = [VariableId(i) for i in range(p.num_variables)]
    n_in = len(variables)
    if p.num_variables > n_in:
        raise ValueError(f"polynomial uses variable {p.num_variables - 1} but only {n_in} are registered")

    terms: dict[tuple[int, ...], float] = {}
    reductions: list[Reduction] = []
    registry = list(variables)

    def add(key: tuple[int, ...], value: float) -> None:
        terms[key] = terms.get(key, 0.0) + value

    for mono in p.monomials():
        key, a = mono
        if len(key) < 3:
            add(key, a)
            continue
        w = len(registry)
        aux = VariableId(w, VariableKind.AUXILIARY, f"aux{len(reductions)}")
        registry.append(aux)
        x, y, z = key
        if a < 0:
            for v in key:
                add((v, w), a)
            add((w,), -2.0 * a)
            identity = ReductionIdentity.KZFD
        else:
            for u, v in ((x, y), (x, z), (y, z)):
                add((u, v), a)
            for v in key:
                add((v, w), -a)
            add((w,), a)
            identity = ReductionIdentity.ISHIKAWA
        reductions.append(Reduction(aux, mono, identity))

    reduced = PseudoBooleanPolynomial(terms, p.offset)
    qubo = QuboProblem.from_polynomial(reduced, variables=registry)
    return qubo, ReductionMap(tuple(reductions), n_in)


def qubo_pattern(q: QuboProblem) -> list[tuple[int, int]]:
    """Sorted, symmetric list of index pairs carrying a nonzero coefficient.

    Diagonal entries ``(i, i)`` mark nonzero linear coefficients.
    """
    pairs = {(i, i) for i in np.flatnonzero(q.linear).tolist()}
    for i, j in q.quadratic:
        pairs.add((i, j))
        pairs.add((j, i))
    return sorted(pairs)


def pattern_bandwidth(pattern: Iterable[tuple[int, int]]) -> int:
    return max((abs(i - j) for i, j in pattern), default=0)


@dataclass(frozen=True)
class CoefficientStats:
    max_abs: float
    min_abs: float
    dynamic_range: float

    def as_dict(self) -> dict[str, float]:
        return {"max_abs": self.max_abs, "min_abs": self.min_abs, "dynamic_range": self.dynamic_range}


def coefficient_stats(q: QuboProblem) -> CoefficientStats:
    """Extremes of the nonzero linear and quadratic coefficient magnitudes."""
    values = np.abs(np.concatenate([q.linear, np.fromiter(q.quadratic.values(), float, len(q.quadratic))]))
    values = values[values > 0]
    if values.size == 0:
        raise ValueError("QUBO has no nonzero coefficients")
    hi, lo = float(values.max()), float(values.min())
    return CoefficientStats(hi, lo, hi / lo)
