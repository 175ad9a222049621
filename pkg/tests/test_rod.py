import itertools

import numpy as np
import pytest
from scipy.integrate import quad

from rodqubo.polynomial import MissingVariableError, VariableKind, coefficient_stats
from rodqubo.rod import (
    CoefficientEncoding,
    DesignableAreas,
    FixedAreas,
    RodProblem,
    analytic_force,
    assemble_internal_energy,
    assemble_objective,
    assemble_penalty,
    build_registry,
    decode_coefficient,
    decode_sample,
    element_residual_polys,
    force_energy,
)
from rodqubo.solvers import exhaustive_solve

DESIGN_ROD = RodProblem(1.5, 2, 1.0, 1.5)
ANALYSIS_ROD = RodProblem(1.5, 5, 1.0, 2.5)


def quadrature_energy(rod, areas, forces):
    """Independent oracle: 1/2 int F^2 / (E A) dx by adaptive quadrature."""
    total = 0.0
    for e in range(rod.n_elements):
        x0, x1 = rod.nodes[e], rod.nodes[e + 1]
        f = lambda s: np.interp(s, rod.nodes, forces) ** 2 / (2 * rod.youngs_modulus[e] * areas[e])
        total += quad(f, x0, x1, epsabs=1e-14, epsrel=1e-14)[0]
    return total


def all_bits(n):
    return itertools.product((0, 1), repeat=n)


# --- encoding -------------------------------------------------------------


@pytest.mark.parametrize(
    "bits, value",
    [((0, 0, 0), 0.0), ((1, 1, 1), 1.0), ((0, 1, 0), 2 / 7), ((1, 0, 0), 1 / 7), ((0, 1, 1), 6 / 7)],
)
def test_decode_coefficient(bits, value):
    assert decode_coefficient(bits, 3) == pytest.approx(value, abs=1e-15)


def test_decode_coefficient_length_mismatch():
    with pytest.raises(ValueError):
        decode_coefficient((1, 0), 3)


@pytest.mark.parametrize("nq", [1, 2, 3, 5])
def test_decode_monotone_in_encoded_integer(nq):
    values = [decode_coefficient([(k >> l) & 1 for l in range(nq)]) for k in range(2**nq)]
    assert values == sorted(values)
    assert values[0] == 0 and values[-1] == 1
    assert np.allclose(np.diff(values), 1 / (2**nq - 1))


def test_encode_nearest_round_trip():
    enc = CoefficientEncoding(10)
    assert enc.decode(enc.encode_nearest(0.9375)) == 959 / 1023
    assert enc.decode(enc.encode_nearest(1.7)) == 1.0
    assert enc.decode(enc.encode_nearest(-0.1)) == 0.0


# --- geometry -------------------------------------------------------------


def test_rod_validation():
    with pytest.raises(ValueError):
        RodProblem(1.0, 0)
    with pytest.raises(ValueError):
        RodProblem(1.0, 2, nodes=(0, 0.8, 0.5))
    with pytest.raises(ValueError):
        RodProblem(1.0, 2, youngs_modulus=(1.0,))
    with pytest.raises(ValueError):
        DesignableAreas((0.5, 0.5))
    rod = RodProblem(1.0, 2, youngs_modulus=(1.0, 2.0), nodes=(0, 0.3, 1.0))
    assert np.allclose(rod.element_lengths, [0.3, 0.7])


# --- energy ---------------------------------------------------------------


def one_element_energy(a0, a1):
    # the closed form on arbitrary nodal values (the QUBO pins the free end to zero)
    return force_energy(RodProblem(1.0, 1), (1.0,), (a0, a1))


def test_element_energy_constant_force():
    assert one_element_energy(1.0, 1.0) == pytest.approx(0.5)


def test_element_energy_linear_force():
    assert one_element_energy(1.0, 0.0) == pytest.approx(1 / 6)


def test_energy_polynomial_single_element():
    rod = RodProblem(1.0, 1)
    U = assemble_internal_energy(rod, FixedAreas((1.0,)), CoefficientEncoding(1))
    assert U.evaluate([1]) == pytest.approx(1 / 6)
    assert U.evaluate([0]) == 0


def test_design_case_energy_matches_quadrature():
    enc = CoefficientEncoding(3)
    assembled = assemble_objective(DESIGN_ROD, DesignableAreas((0.25, 0.5)), enc, 5.0)
    bits = assembled.encode((6 / 7, 2 / 7, 0.0), (1, 0))
    sol = decode_sample(assembled, bits)
    oracle = quadrature_energy(DESIGN_ROD, (0.5, 0.25), (6 / 7, 2 / 7, 0.0))
    assert oracle == pytest.approx(0.30612244897959184, abs=1e-12)
    assert assembled.energy.evaluate(bits) == pytest.approx(oracle, abs=1e-12)
    assert sol.energy == pytest.approx(oracle, abs=1e-12)


@pytest.mark.parametrize("areas", [FixedAreas((0.3, 0.7, 0.2)), DesignableAreas((0.25, 0.5))])
def test_energy_polynomial_matches_quadrature_everywhere(areas):
    rod = RodProblem(1.2, 3, (1.0, 2.0, 0.5), 1.3, nodes=(0, 0.2, 0.7, 1.2))
    enc = CoefficientEncoding(2)
    U = assemble_internal_energy(rod, areas, enc)
    assembled = assemble_objective(rod, areas, enc, 1.0)
    rng = np.random.default_rng(3)
    for _ in range(20):
        bits = rng.integers(0, 2, assembled.num_inputs)
        sol = decode_sample(assembled, bits)
        assert U.evaluate(bits) == pytest.approx(quadrature_energy(rod, sol.areas, sol.nodal_forces), abs=1e-12)


def test_energy_degree():
    enc = CoefficientEncoding(3)
    assert assemble_internal_energy(DESIGN_ROD, FixedAreas((0.5, 0.25)), enc).degree == 2
    assert assemble_internal_energy(DESIGN_ROD, DesignableAreas((0.25, 0.5)), enc).degree == 3


# --- penalty --------------------------------------------------------------


def test_penalty_zero_at_exact_encodable_solution():
    # A f dx = 1/7 per element so the exact forces 3/7, 2/7, 1/7, 0 are representable
    rod = RodProblem(3.0, 3, 1.0, 1 / 7)
    enc = CoefficientEncoding(3)
    areas = FixedAreas((1.0, 1.0, 1.0))
    exact = analytic_force(rod, areas)
    assert np.allclose(exact.nodal_forces, [3 / 7, 2 / 7, 1 / 7, 0])
    assembled = assemble_objective(rod, areas, enc, 1.0)
    bits = assembled.encode(exact.nodal_forces)
    assert assemble_penalty(rod, areas, enc).evaluate(bits) == pytest.approx(0, abs=1e-14)


def test_penalty_design_element_residual():
    enc = CoefficientEncoding(3)
    residuals = element_residual_polys(DESIGN_ROD, DesignableAreas((0.25, 0.5)), enc)
    assembled = assemble_objective(DESIGN_ROD, DesignableAreas((0.25, 0.5)), enc, 5.0)
    bits = assembled.encode((6 / 7, 2 / 7, 0.0), (1, 0))
    expected = (2 / 7 - 6 / 7) / 0.5 + 0.75 * 1.5
    assert expected == pytest.approx(-0.017857142857142794)
    assert residuals[0].evaluate(bits) == pytest.approx(expected, abs=1e-14)
    assert residuals[1].evaluate(bits) == pytest.approx((0 - 2 / 7) / 0.25 + 1.125, abs=1e-14)


def test_penalty_all_zero_forces():
    rod = RodProblem(1.0, 1, 1.0, 1.0)
    pen = assemble_penalty(rod, FixedAreas((0.5,)), CoefficientEncoding(4))
    assert pen.evaluate([0] * 4) == pytest.approx(1.0)


def test_penalty_degree_design():
    pen = assemble_penalty(DESIGN_ROD, DesignableAreas((0.25, 0.5)), CoefficientEncoding(3))
    assert pen.degree == 3


# --- objective ------------------------------------------------------------


def test_objective_lambda_zero_is_energy():
    a = assemble_objective(DESIGN_ROD, DesignableAreas((0.25, 0.5)), CoefficientEncoding(3), 0.0)
    assert a.objective == a.energy


@pytest.mark.parametrize("lam", [0.5, 5.0, 20.0, 1e9])
def test_objective_identity(lam):
    a = assemble_objective(DESIGN_ROD, DesignableAreas((0.25, 0.5)), CoefficientEncoding(3), lam)
    assert a.objective.isclose(a.energy + a.penalty * lam)


def test_negative_penalty_weight_rejected():
    with pytest.raises(ValueError):
        assemble_objective(DESIGN_ROD, FixedAreas((0.5, 0.5)), CoefficientEncoding(2), -1.0)


def test_reference_analysis_size():
    a = assemble_objective(ANALYSIS_ROD, FixedAreas((0.25,) * 5), CoefficientEncoding(10), 20.0)
    assert a.num_inputs == 50 and a.objective.degree == 2
    assert a.objective.num_variables == 50
    q, rmap = a.reduced()
    assert q.dimension == 50 and len(rmap) == 0


def test_reference_design_size():
    a = assemble_objective(DESIGN_ROD, DesignableAreas((0.25, 0.5)), CoefficientEncoding(3), 5.0)
    assert a.num_inputs == 8 and a.objective.degree == 3
    q, rmap = a.reduced()
    # 15 coefficient-bit pairs on element 1 plus 3 on element 2, each times a design bit
    assert len(rmap) == 18 and q.dimension == 26
    kinds = [v.kind for v in q.variables]
    assert kinds == [VariableKind.COEFFICIENT] * 6 + [VariableKind.DESIGN] * 2 + [VariableKind.AUXILIARY] * 18


def test_registry_shares_interior_nodes():
    reg = build_registry(ANALYSIS_ROD, FixedAreas((0.25,) * 5), CoefficientEncoding(4))
    assert len(reg.node_bits) == 6 and reg.node_bits[-1] == ()
    flat = [v for ids in reg.node_bits for v in ids]
    assert flat == list(range(20))
    # element e uses node_bits[e] and node_bits[e+1]; the interior ones are the same objects
    residuals = element_residual_polys(ANALYSIS_ROD, FixedAreas((0.25,) * 5), CoefficientEncoding(4))
    for e in range(4):
        shared = set(reg.node_bits[e + 1])
        assert shared <= residuals[e].variables and shared <= residuals[e + 1].variables


def test_variable_counts():
    for ne, nq in [(1, 1), (3, 4), (5, 10)]:
        rod = RodProblem(1.0, ne)
        assert assemble_objective(rod, FixedAreas((1.0,) * ne), CoefficientEncoding(nq), 1.0).num_inputs == ne * nq
        assert assemble_objective(rod, DesignableAreas((1, 2)), CoefficientEncoding(nq), 1.0).num_inputs == ne * nq + ne


@pytest.mark.parametrize("areas", [FixedAreas((0.4, 0.2)), DesignableAreas((0.25, 0.5))])
def test_energy_and_penalty_nonnegative_exhaustive(areas):
    a = assemble_objective(RodProblem(1.0, 2, 1.0, 1.0), areas, CoefficientEncoding(3), 2.0)
    for bits in all_bits(a.num_inputs):
        assert a.energy.evaluate(bits) >= -1e-12
        assert a.penalty.evaluate(bits) >= -1e-12


def test_energy_and_penalty_nonnegative_sampled_full_scale():
    a = assemble_objective(ANALYSIS_ROD, FixedAreas((0.25,) * 5), CoefficientEncoding(10), 20.0)
    rng = np.random.default_rng(0)
    for bits in rng.integers(0, 2, (200, 50)):
        assert a.energy.evaluate(bits) >= 0 and a.penalty.evaluate(bits) >= 0


@pytest.mark.parametrize("ne, nq", [(1, 2), (2, 3), (3, 4), (2, 4)])
def test_global_min_below_quantized_analytic(ne, nq):
    rod = RodProblem(1.5, ne, 1.0, 1.2)
    areas = FixedAreas(tuple(0.3 + 0.1 * e for e in range(ne)))
    a = assemble_objective(rod, areas, CoefficientEncoding(nq), 10.0)
    q = a.to_qubo()
    best = exhaustive_solve(q).lowest_energy
    assert best <= q.energy(a.encode(analytic_force(rod, areas).nodal_forces)) + 1e-12


# --- analytic solution ----------------------------------------------------


def test_analytic_uniform_case():
    sol = analytic_force(ANALYSIS_ROD, FixedAreas((0.25,) * 5))
    assert sol.nodal_forces[0] == pytest.approx(0.9375)
    assert sol.nodal_forces[-1] == 0
    assert np.allclose(sol.nodal_forces, [0.25 * 2.5 * (1.5 - x) for x in sol.nodes])
    assert sol.max_residual == pytest.approx(0, abs=1e-14)


def test_analytic_design_case():
    sol = analytic_force(DESIGN_ROD, (0.5, 0.25))
    assert sol.nodal_forces == pytest.approx((0.84375, 0.28125, 0.0))


# --- decoding -------------------------------------------------------------


def test_decode_all_zero():
    a = assemble_objective(DESIGN_ROD, DesignableAreas((0.25, 0.5)), CoefficientEncoding(3), 5.0)
    sol = decode_sample(a, [0] * 8)
    assert sol.nodal_forces == (0, 0, 0) and sol.areas == (0.25, 0.25)


def test_decode_design_optimum():
    a = assemble_objective(DESIGN_ROD, DesignableAreas((0.25, 0.5)), CoefficientEncoding(3), 5.0)
    bits = (0, 1, 1, 0, 1, 0, 1, 0)
    sol = decode_sample(a, bits)
    assert sol.areas == (0.5, 0.25)
    assert sol.nodal_forces == pytest.approx((0.857142857142857, 0.285714285714286, 0.0))
    assert sol.design_bits == (1, 0)
    assert sol.objective == pytest.approx(a.objective.evaluate(bits), abs=1e-12)


def test_decode_ignores_auxiliaries_and_checks_length():
    a = assemble_objective(DESIGN_ROD, DesignableAreas((0.25, 0.5)), CoefficientEncoding(3), 5.0)
    full = a.complete((0, 1, 1, 0, 1, 0, 1, 0))
    assert len(full) == 26
    assert decode_sample(a, full) == decode_sample(a, full[:8])
    # completed auxiliaries reproduce the cubic objective exactly
    assert a.to_qubo().energy(full) == pytest.approx(a.objective.evaluate(full[:8]), abs=1e-12)
    with pytest.raises(MissingVariableError):
        decode_sample(a, full[:7])


def test_decoded_objective_consistent_random():
    a = assemble_objective(ANALYSIS_ROD, FixedAreas((0.25,) * 5), CoefficientEncoding(6), 20.0)
    rng = np.random.default_rng(1)
    for bits in rng.integers(0, 2, (50, a.num_inputs)):
        sol = decode_sample(a, bits)
        assert sol.objective == pytest.approx(a.objective.evaluate(bits), rel=1e-12, abs=1e-12)
        assert sol.energy == pytest.approx(a.energy.evaluate(bits), rel=1e-12, abs=1e-12)


def test_penalty_weight_drives_coefficient_growth():
    stats = [
        coefficient_stats(assemble_objective(ANALYSIS_ROD, FixedAreas((0.25,) * 5), CoefficientEncoding(10), lam).to_qubo())
        for lam in (20.0, 1e9)
    ]
    # the largest coefficient follows lambda while the max/min spread barely moves
    assert stats[1].max_abs / stats[0].max_abs == pytest.approx(4.9844e7, rel=1e-4)
    assert stats[0].dynamic_range == pytest.approx(2.6337e5, rel=1e-4)
    assert stats[1].dynamic_range == pytest.approx(2.62144e5, rel=1e-4)
