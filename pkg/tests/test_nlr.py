import random

import pytest
from hypothesis import given, settings, strategies as st

from xtrvmss.errors import ConstraintError, InsufficientSharesError, ParameterError
from xtrvmss.nlr import (
    NlrSpec,
    Variant,
    binomial,
    check_modulus,
    coefficients,
    completions,
    eval_closed_form,
    extend_consecutive,
    generate,
    lagrange_coefficients,
    recover_polynomial,
    recurrence_holds,
    rhs,
    solve_linear,
    vandermonde_coefficients,
)

Q = 10007


def test_frozen_sequences():
    assert generate(NlrSpec(Variant.NLR2, 2, 1, (1, 2), 13), 6).terms == (1, 2, 3, 5, 9, 3, 1)
    assert generate(NlrSpec(Variant.NLR1, 2, 1, (0, 0), 13), 6).terms == (0, 0, 0, 12, 4, 3, 7)


def test_coefficients_and_rhs():
    assert coefficients(Variant.NLR1, 3, 13) == [1, 3, 3, 1]
    assert coefficients(Variant.NLR2, 3, 13) == [1, 10, 3, 12]
    assert rhs(Variant.NLR1, 2, 3, 13) == (-6) % 13
    assert rhs(Variant.NLR2, 2, 3, 13) == 6
    assert rhs(Variant.NLR1, 5, 0, 13) == rhs(Variant.NLR2, 5, 0, 13) == 0


def test_modulus_constraint_names_binomial():
    check_modulus(4, 7)
    with pytest.raises(ConstraintError, match=r"C\(5,2\)=10"):
        check_modulus(5, 7)
    with pytest.raises(ConstraintError):
        NlrSpec(Variant.NLR1, 5, 1, (1,) * 5, 7)


def test_spec_validation():
    with pytest.raises(ParameterError):
        NlrSpec(Variant.NLR1, 0, 1, (), 13)
    with pytest.raises(ParameterError):
        NlrSpec(Variant.NLR1, 2, 1, (1,), 13)
    with pytest.raises(ParameterError):
        NlrSpec(Variant.NLR1, 2, 0, (1, 2), 13)
    with pytest.raises(ParameterError):
        NlrSpec(Variant.NLR1, 2, 1, (1, 13), 13)
    with pytest.raises(ParameterError):
        binomial(3, 4)


specs = st.builds(
    lambda v, k, c, init: NlrSpec(v, k, c, tuple(init[:k]), Q),
    st.sampled_from(Variant),
    st.integers(min_value=1, max_value=5),
    st.integers(min_value=1, max_value=Q - 1),
    st.lists(st.integers(min_value=0, max_value=Q - 1), min_size=5, max_size=5),
)


@given(specs)
def test_generated_terms_satisfy_recursion(spec):
    seq = generate(spec, 30)
    assert recurrence_holds(spec.variant, seq.terms, 0, spec.c, spec.k, Q)


@given(specs, st.integers(min_value=0, max_value=20))
def test_extend_from_any_window(spec, s):
    terms = generate(spec, 40).terms
    window = terms[s:s + spec.k]
    assert extend_consecutive(spec.variant, window, s, spec.c, spec.k, Q, 40) == list(terms[s:])


@given(specs, st.randoms(use_true_random=False))
@settings(max_examples=60)
def test_closed_form_interpolation(spec, rng):
    k = spec.k
    terms = generate(spec, 40).terms
    xs = rng.sample(range(41), k + 2)
    points = [(x, terms[x]) for x in xs]
    poly = recover_polynomial(spec.variant, points, k, Q)
    assert len(poly.coeffs) == k + 2
    assert [eval_closed_form(spec.variant, poly, i, Q) for i in range(41)] == list(terms)
    assert recover_polynomial(spec.variant, points, k, Q, method="gauss") == poly


def test_recover_point_count_errors():
    spec = NlrSpec(Variant.NLR2, 2, 5, (3, 4), Q)
    terms = generate(spec, 10).terms
    pts = [(i, terms[i]) for i in range(5)]
    with pytest.raises(InsufficientSharesError):
        recover_polynomial(Variant.NLR2, pts[:3], 2, Q)
    with pytest.raises(ParameterError):
        recover_polynomial(Variant.NLR2, pts, 2, Q)
    with pytest.raises(ParameterError):
        recover_polynomial(Variant.NLR2, [(0, 1), (Q, 1), (2, 3), (3, 4)], 2, Q)
    with pytest.raises(ParameterError):
        recover_polynomial(Variant.NLR2, pts[:4], 2, Q, method="newton")


def test_lagrange_and_linear_solve_frozen():
    points = [(0, 1), (1, 3), (2, 7)]  # 1 + x + x²
    assert lagrange_coefficients(points, 13) == [1, 1, 1]
    assert vandermonde_coefficients(points, 13) == [1, 1, 1]
    assert solve_linear([[2, 1], [1, 3]], [3, 5], 13) == [pow(5, -1, 13) * 4 % 13, pow(5, -1, 13) * 7 % 13]
    with pytest.raises(ParameterError):
        solve_linear([[1, 2], [2, 4]], [1, 2], 13)


def test_extend_consecutive_validation():
    with pytest.raises(ParameterError):
        extend_consecutive(Variant.NLR1, [1], 0, 1, 2, 13, 5)
    with pytest.raises(ParameterError):
        extend_consecutive(Variant.NLR1, [1, 2], -1, 1, 2, 13, 5)


@pytest.mark.parametrize("variant", list(Variant))
def test_completions_leave_every_value_open(variant):
    # k + 1 points of a closed-form sequence: each value at a fresh position is possible
    rng = random.Random(3)
    spec = NlrSpec(variant, 3, 4, tuple(rng.randrange(1, 13) for _ in range(3)), 13)
    terms = generate(spec, 12).terms
    points = [(0, terms[0]), (2, terms[2]), (8, terms[8]), (9, terms[9])]
    assert completions(variant, points, 3, 13, 5) == list(range(13))
