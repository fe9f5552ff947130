"""Tests for the exact invariant geometry on SU(3) and its flag quotient."""

import json
import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistorlab.flag import (
    GENERATOR_NAMES,
    SU3_BASIS,
    SU3Element,
    appendix_table,
    flag_acs,
    flag_balanced,
    flag_bidegree_part,
    flag_conj,
    flag_d,
    flag_dK,
    flag_ddbar,
    flag_K,
    generator_form,
    integrability_obstruction,
    maurer_cartan,
    maurer_cartan_eval,
    nearly_kahler_check,
    normalization_crosscheck,
    structure_equation_residual,
    structural_ddbar,
)
from twistorlab.flag import _d_table, _displayed_structure_equations

SQ2 = math.sqrt(2.0)
TRIPLE = (1.3, 0.7, 2.1)


def random_direction(seed):
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(8)
    return sum(c * B for c, B in zip(coeffs, SU3_BASIS))


# ======================================================================
# structure equations and the formal differential
# ======================================================================

def test_displayed_structure_equations_match_table():
    table = _d_table()
    for k, displayed in _displayed_structure_equations().items():
        assert (table[k] - displayed).norm() == 0.0


def test_d_squared_vanishes_on_every_generator():
    table = _d_table()
    for k in range(8):
        assert flag_d(table[k]).norm() == 0.0


def test_d_commutes_with_conjugation():
    for k in range(8):
        g = generator_form(k)
        assert (flag_d(flag_conj(g)) - flag_conj(flag_d(g))).norm() == 0.0


def test_conjugation_is_an_involution():
    for k in range(8):
        g = generator_form(k)
        assert (flag_conj(flag_conj(g)) - g).norm() == 0.0


def test_conjugation_swaps_transposed_entries():
    # skew-Hermitian symmetry of the matrix of 1-forms
    assert flag_conj(generator_form(0)).terms == {(3,): (-1 + 0j)}
    assert flag_conj(generator_form(4)).terms == {(1,): (-1 + 0j)}
    assert flag_conj(generator_form(6)).terms == {(6,): (-1 + 0j)}


# ======================================================================
# group elements and the left-invariant form
# ======================================================================

def test_group_element_rejects_non_unitary():
    with pytest.raises(ValueError, match="special unitary"):
        SU3Element(2.0 * np.eye(3))


def test_group_element_rejects_unit_determinant_violation():
    with pytest.raises(ValueError, match="special unitary"):
        SU3Element(np.diag([-1.0, 1.0, 1.0]).astype(complex))


def test_random_element_is_reproducible():
    g1 = SU3Element.random(11)
    g2 = SU3Element.random(11)
    assert np.array_equal(g1.g, g2.g)
    assert np.max(np.abs(np.conj(g1.g.T) @ g1.g - np.eye(3))) < 1e-12


def test_form_at_identity_reads_off_the_direction():
    e = SU3Element.identity()
    for k in range(8):
        assert np.max(np.abs(maurer_cartan(e, k) - SU3_BASIS[k])) == 0.0


def test_left_invariance_at_random_element():
    g = SU3Element.random(7)
    for k in range(8):
        assert np.max(np.abs(maurer_cartan(g, k) - SU3_BASIS[k])) < 1e-12


def test_direction_must_be_in_the_algebra():
    with pytest.raises(ValueError, match="skew-Hermitian traceless"):
        maurer_cartan(np.eye(3, dtype=complex), np.diag([1.0, -1.0, 0.0]))


def test_evaluated_form_is_algebra_valued_and_traceless():
    ev = maurer_cartan_eval(SU3Element.random(3))
    assert ev.values.shape == (3, 3, 8)
    diag_sum = ev.values[0, 0, :] + ev.values[1, 1, :] + ev.values[2, 2, :]
    assert np.max(np.abs(diag_sum)) < 1e-12
    assert np.max(np.abs(ev.covector(0, 1) + np.conj(ev.values[1, 0, :]))) < 1e-12


@pytest.mark.parametrize("seed", [7, 21, 99])
def test_finite_difference_structure_equation(seed):
    g = SU3Element.random(7)
    X = random_direction(seed)
    Y = random_direction(seed + 1)
    assert structure_equation_residual(g, X, Y) < 1e-6


# ======================================================================
# invariant almost complex structures
# ======================================================================

@pytest.mark.parametrize("i", range(1, 9))
def test_acs_squares_to_minus_identity(i):
    J = flag_acs(i)
    assert np.max(np.abs(J @ J + np.eye(6))) == 0.0


@pytest.mark.parametrize("i", [1, 2, 3, 4])
def test_acs_conjugate_pairs_are_negatives(i):
    assert np.array_equal(flag_acs(i + 4), -flag_acs(i))


def test_integrability_census():
    obstructions = {i: integrability_obstruction(i) for i in range(1, 9)}
    for i in (1, 3, 4, 5, 7, 8):
        assert obstructions[i] == 0.0
    for i in (2, 6):
        assert obstructions[i] >= 1.0
    assert sum(1 for v in obstructions.values() if v == 0.0) == 6


def test_bidegree_parts_partition_a_derivative():
    dk = flag_dK(2, TRIPLE)
    parts = [flag_bidegree_part(dk, 2, p) for p in range(4)]
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    assert (total - dk).norm() == 0.0


def test_bidegree_rejects_non_quotient_forms():
    with pytest.raises(ValueError, match="diagonal"):
        flag_bidegree_part(_d_table()[0], 1, 1)


# ======================================================================
# the invariant metric family: first derivatives
# ======================================================================

@pytest.mark.parametrize("i", [1, 2, 3, 4])
def test_fundamental_form_is_real(i):
    K = flag_K(i, TRIPLE)
    assert (flag_conj(K) - K).norm() == 0.0


@pytest.mark.parametrize("i", [1, 2, 3, 4])
@pytest.mark.parametrize("lam", [1.0, SQ2, TRIPLE])
def test_derivative_display_matches_structural_d(i, lam):
    assert (flag_d(flag_K(i, lam)) - flag_dK(i, lam)).norm() < 1e-12


def test_one_parameter_derivative_coefficients():
    lam = 0.77
    rows = appendix_table(lam)["rows"]
    expected = {1: 2.0 - lam ** 2, 2: 2.0 + lam ** 2, 3: -lam ** 2, 4: lam ** 2}
    for row in rows:
        assert abs(row["dK_coefficient"] - expected[row["i"]]) < 1e-12


@pytest.mark.parametrize("i,lam", [
    (1, (1.0, 1.0, SQ2)),
    (1, SQ2),
    (3, (math.sqrt(5.0), 1.0, 2.0)),
    (4, (1.0, math.sqrt(10.0), 3.0)),
])
def test_symplectic_parameter_values(i, lam):
    assert flag_dK(i, lam).norm() < 1e-12


@pytest.mark.parametrize("lam", [0.4, 1.0, (0.3, 2.5, 1.1)])
def test_second_structure_never_closes(lam):
    # coefficient is a sum of squares: |dK| = coeff * sqrt(2) > 0
    dk = flag_dK(2, lam)
    assert dk.norm() > SQ2 * 0.09


def test_derivative_norm_is_coefficient_times_sqrt2():
    dk = flag_dK(2, (1.1, 0.8, 1.7))
    coeff = 1.1 ** 2 + 0.8 ** 2 + 1.7 ** 2
    assert abs(dk.norm() - coeff * SQ2) < 1e-12


def test_second_structure_one_two_part_vanishes():
    dk = flag_dK(2, (1.1, 0.8, 1.7))
    assert flag_bidegree_part(dk, 2, 1).norm() == 0.0
    assert flag_bidegree_part(dk, 2, 2).norm() == 0.0
    # all of the mass sits in the two pure bidegrees
    coeff = 1.1 ** 2 + 0.8 ** 2 + 1.7 ** 2
    assert abs(flag_bidegree_part(dk, 2, 3).norm() - coeff) < 1e-12
    assert abs(flag_bidegree_part(dk, 2, 0).norm() - coeff) < 1e-12


@pytest.mark.parametrize("i", [1, 2, 3, 4])
@pytest.mark.parametrize("lam", [1.7, (1.0, 2.0, 3.0)])
def test_balanced_condition_is_exact(i, lam):
    assert flag_balanced(i, lam).norm() == 0.0


@pytest.mark.parametrize("bad", [-0.5, 0.0, (1.0, 0.0, 1.0), (1.0, -2.0, 1.0)])
def test_nonpositive_parameters_rejected(bad):
    with pytest.raises(ValueError, match="positive"):
        flag_K(1, bad)


@pytest.mark.parametrize("i", [0, 5, 9])
def test_bad_structure_index_rejected(i):
    with pytest.raises(ValueError, match="1..4"):
        flag_dK(i, 1.0)


# ======================================================================
# second derivatives
# ======================================================================

@pytest.mark.parametrize("i", [1, 3, 4])
@pytest.mark.parametrize("lam", [1.0, 0.77, TRIPLE])
def test_second_derivative_display_matches_structural(i, lam):
    assert (flag_ddbar(i, lam) - structural_ddbar(i, lam)).norm() < 1e-12


def test_second_derivative_refused_for_second_structure():
    with pytest.raises(ValueError, match="i = 2"):
        flag_ddbar(2, 1.0)


def test_second_derivative_vanishes_at_the_root():
    assert flag_ddbar(1, (1.0, 1.0, SQ2)).norm() < 1e-12


@pytest.mark.parametrize("lam", [0.9, 1.7])
def test_one_parameter_second_derivatives_coincide(lam):
    assert (flag_ddbar(3, lam) - flag_ddbar(4, lam)).norm() < 1e-12


# ======================================================================
# distinguished identities and the numeric crosscheck
# ======================================================================

def test_nearly_kahler_identities_are_exact():
    r1, r2 = nearly_kahler_check()
    assert r1 < 1e-12
    assert r2 < 1e-12


def test_normalization_crosscheck_default():
    numeric, exact = normalization_crosscheck()
    assert exact == 2.0
    assert abs(numeric - 2.0) < 1e-6


@pytest.mark.parametrize("c,expected", [(4.0, 1.0), (1.0, 4.0)])
def test_normalization_crosscheck_rescaled(c, expected):
    numeric, _ = normalization_crosscheck(c=c)
    assert abs(numeric - expected) < 1e-6


# ======================================================================
# the summary table
# ======================================================================

def test_summary_table_is_exact_fast_and_serializable():
    start = time.time()
    table = appendix_table()
    elapsed = time.time() - start
    assert elapsed < 1.0
    assert table["structure_equation_residual"] == 0.0
    assert table["integrable_count"] == 6
    assert table["nearly_kahler_residuals"] == [0.0, 0.0]
    assert table["generators"] == list(GENERATOR_NAMES)
    by_i = {row["i"]: row for row in table["rows"]}
    assert set(by_i) == {1, 2, 3, 4}
    for row in by_i.values():
        assert row["dK_residual"] == 0.0
        assert row["balanced_norm"] == 0.0
        assert row["dd_residual"] == 0.0
    assert by_i[1]["dK_coefficient"] == 1.0
    assert by_i[2]["dK_coefficient"] == 3.0
    assert by_i[3]["dK_coefficient"] == -1.0
    assert by_i[2]["ddbar_residual"] is None
    assert by_i[2]["one_two_part_norm"] == 0.0
    assert by_i[2]["integrable"] is False
    assert by_i[4]["ddbar_residual"] == 0.0
    json.dumps(table)


# ======================================================================
# property-based checks
# ======================================================================

@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_structural_derivative_always_matches_display(i, seed):
    rng = np.random.default_rng(seed)
    lams = tuple(float(v) for v in rng.uniform(0.2, 3.0, size=3))
    assert (flag_d(flag_K(i, lams)) - flag_dK(i, lams)).norm() < 1e-12
    assert flag_balanced(i, lams).norm() == 0.0


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_structure_equations_hold_along_random_curves(seed):
    g = SU3Element.random(seed)
    X = random_direction(seed + 1)
    Y = random_direction(seed + 2)
    assert structure_equation_residual(g, X, Y) < 1e-6
