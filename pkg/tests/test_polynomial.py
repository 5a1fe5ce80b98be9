from fractions import Fraction as F
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgorb.errors import DegenerateType, NonIntegerMilnorNumber, NotSquare, ParseError, SingularMatrix
from lgorb.polynomial import (
    CHAIN,
    FERMAT,
    LOOP,
    WeightSystem,
    block_matrix,
    det,
    enumerate_invertible,
    from_string,
    inverse,
    loop_basis,
    milnor_basis_exact,
    milnor_number,
    parse_polynomial,
    polynomial_isomorphic,
    same_up_to_relabeling_bruteforce,
    transpose,
    transpose_matrix,
    validate_invertible,
    weights,
)

from conftest import LOOP7

BATTERY = list(enumerate_invertible(3, 5, 60))


def test_parse_polynomial():
    names, rows = parse_polynomial("x2^5 * x10 + x10^2 +x2")
    assert names == ["x2", "x10"]
    assert rows == [(5, 1), (0, 2), (1, 0)]
    assert parse_polynomial("a*b^2 + b", ["b", "a"])[1] == [(2, 1), (1, 0)]


@pytest.mark.parametrize("bad", ["", "x1^0", "2*x1", "x1 + ", "x1^-2", "x1^a"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_polynomial(bad)


def test_undeclared_variable():
    with pytest.raises(ParseError):
        parse_polynomial("x1 + y", ["x1"])


def test_loop7_is_a_loop():
    f = from_string(LOOP7)
    assert [(b.kind, b.a) for b in f.blocks] == [(LOOP, (3, 5, 3, 5))]
    assert abs(f.det) == 224


def test_fermat_sum_and_even_loop():
    assert [(b.kind, b.a) for b in from_string("x1^3 + x2^3").blocks] == [(FERMAT, (3,)), (FERMAT, (3,))]
    assert [(b.kind, b.a) for b in from_string("x1^2*x2 + x2^2*x1").blocks] == [(LOOP, (2, 2))]
    with pytest.raises(DegenerateType):
        from_string("x1^1*x2 + x2^3*x1")


def test_quadratic_chain_is_accepted():
    # x1^2 + x1*x2 is the chain x2*x1 + x1^2; its matrix is invertible with det 2
    f = from_string("x1^2 + x1*x2")
    assert [(b.kind, b.a) for b in f.blocks] == [(CHAIN, (1, 2))]
    assert weights(f.E) == WeightSystem((1, 1), 2)


def test_validation_errors():
    with pytest.raises(NotSquare):
        from_string("x1^2 + x2^2 + x1*x2")
    with pytest.raises(NotSquare):
        validate_invertible([(2, 0), (0, 2), (1, 1)])
    with pytest.raises(SingularMatrix):
        validate_invertible([(2, 2), (1, 1)])


def test_weights_examples():
    assert weights([(5,)]) == WeightSystem((1,), 5)
    assert weights(from_string(LOOP7).E) == WeightSystem((2, 1, 2, 1), 7)
    assert weights(from_string("x1^3*x2 + x2^4").E) == WeightSystem((1, 1), 4)


def test_milnor_number_examples():
    assert milnor_number(WeightSystem((1,), 3)) == 2
    assert milnor_number(weights(from_string(LOOP7).E)) == 225
    assert milnor_number(WeightSystem((2, 1), 7)) == 15
    assert milnor_number(WeightSystem((), 1)) == 1
    with pytest.raises(NonIntegerMilnorNumber):
        milnor_number(WeightSystem((2,), 5))


def test_transpose_examples():
    f = from_string(LOOP7)
    ft = transpose(f)
    assert [(b.kind, b.a) for b in ft.blocks] == [(LOOP, (3, 5, 3, 5))]
    assert ft.monomial_set() != f.monomial_set()
    assert polynomial_isomorphic(f, ft) is not None
    fermat = from_string("x1^2 + x2^3 + x3^5")
    assert transpose(fermat).E == fermat.E
    chain = transpose(from_string("x1^3*x2 + x2^4"))
    assert chain.to_string() == "x1^3 + x1*x2^4"


def test_polynomial_isomorphic_rejects():
    assert polynomial_isomorphic(from_string("x1^3 + x2^4"), from_string("x1^3 + x2^5")) is None
    assert polynomial_isomorphic(from_string("x1^2*x2 + x2^3"), from_string("x1^3*x2 + x2^2")) is None


def _block_det(kind, a):
    prod = 1
    for x in a:
        prod *= x
    if kind == LOOP:
        return prod - (-1) ** len(a)
    return prod


@pytest.mark.parametrize("f", BATTERY, ids=str)
def test_structural_properties(f):
    # determinant from the blocks
    block_det = 1
    for b in f.blocks:
        block_det *= _block_det(b.kind, b.a)
    assert abs(f.det) == abs(block_det)
    # double transpose
    assert transpose(transpose(f)).E == f.E
    # quasihomogeneity of every monomial
    ws = f.weights
    assert all(sum(k * w for k, w in zip(row, ws.w)) == ws.d for row in f.E)
    # Milnor number against exact bases
    mu = milnor_number(ws)
    assert mu == len(milnor_basis_exact(f.E, ws.w, ws.d))
    expected = 1
    for b in f.blocks:
        if b.kind == FERMAT:
            expected *= b.a[0] - 1
        elif b.kind == LOOP:
            expected *= len(loop_basis(b.a))
        else:
            rows = block_matrix(CHAIN, b.a)
            w = weights(rows)
            expected *= len(milnor_basis_exact(rows, w.w, w.d))
    assert mu == expected


@pytest.mark.parametrize("a", [(2, 2), (2, 3), (3, 3), (2, 2, 2), (2, 3, 4), (3, 5, 3, 5)])
def test_loop_basis_spans_milnor_algebra(a):
    rows = block_matrix(LOOP, a)
    w = weights(rows)
    exact = milnor_basis_exact(rows, w.w, w.d)
    assert len(exact) == len(loop_basis(a)) == milnor_number(w)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(BATTERY), st.randoms(use_true_random=False))
def test_relabeling_is_detected(f, rnd):
    perm = list(range(f.n))
    rnd.shuffle(perm)
    rows = [tuple(row[perm[j]] for j in range(f.n)) for row in f.E]
    rnd.shuffle(rows)
    g = validate_invertible(rows)
    pi = polynomial_isomorphic(f, g)
    assert pi is not None
    assert same_up_to_relabeling_bruteforce(f, g)


def test_exact_inverse():
    E = [(3, 1, 0), (0, 4, 1), (1, 0, 2)]
    inv = inverse(E)
    for i in range(3):
        for j in range(3):
            assert sum(F(E[i][k]) * inv[k][j] for k in range(3)) == (1 if i == j else 0)
    assert det(E) == 25
    assert tuple(map(tuple, transpose_matrix(E))) == ((3, 0, 1), (1, 4, 0), (0, 1, 2))


def test_battery_size_and_closure():
    assert len(BATTERY) > 100
    for f in BATTERY:
        assert abs(f.det) <= 60
        assert sum(len(b.vars) for b in f.blocks) <= 3
        transpose(f)


def test_brute_force_relabeling_agrees_on_small_cases():
    f = from_string("x1^2*x2 + x2^3*x3 + x3^2")
    for perm in permutations(range(3)):
        rows = [tuple(row[perm[j]] for j in range(3)) for row in f.E]
        assert polynomial_isomorphic(f, validate_invertible(rows)) is not None
