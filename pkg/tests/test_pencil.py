from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symmetroids.linalg import upper_of
from symmetroids.pencil import (Pencil, PencilParseError, det_and_grad, eval_pencil, format_number, format_pencil,
                                grid_samples, is_semidefinite, parse_number, parse_pencil, signature)

from conftest import random_pencil

rationals = st.builds(Fraction, st.integers(-999, 999), st.integers(1, 50))


@given(st.lists(rationals, min_size=60, max_size=60), st.integers(0, 1000))
def test_format_parse_roundtrip_exact(values, seed):
    # make the four blocks independent by adding distinct diagonal shifts
    values = list(values)
    for b in range(4):
        values[b * 15 + [0, 5, 9, 12][b]] += 1000 * (b + 1)
    P = Pencil.from_upper(values)
    Q = parse_pencil(format_pencil(P))
    assert Q.exact == P.exact
    assert Q == P


def test_float_pencil_roundtrip():
    P = random_pencil(3)
    Q = parse_pencil(format_pencil(P))
    np.testing.assert_array_equal(Q.mats, P.mats)


@pytest.mark.parametrize("token, value", [("3", 3), ("-1/2", Fraction(-1, 2)), ("0.1", Fraction(1, 10)),
                                          ("1e-3", Fraction(1, 1000)), ("+.5", Fraction(1, 2))])
def test_parse_number(token, value):
    assert parse_number(token) == value


def test_format_number():
    assert format_number(Fraction(3, 4)) == "0.75"
    assert format_number(Fraction(-3, 8)) == "-0.375"
    assert format_number(Fraction(1, 3)) == "1/3"
    assert format_number(7) == "7"


def test_parse_errors_report_position():
    text = format_pencil(random_pencil(1)).splitlines()
    text[2] = "0.1 abc 0.3"
    with pytest.raises(PencilParseError) as err:
        parse_pencil("\n".join(text))
    assert err.value.line == 3 and err.value.column == 5
    with pytest.raises(PencilParseError, match="4 blocks"):
        parse_pencil("1 2 3\n")
    short = "\n".join(format_pencil(random_pencil(1)).splitlines()[1:])
    with pytest.raises(PencilParseError, match="block A0"):
        parse_pencil(short)


def test_parse_comments_and_dependent_blocks():
    block = "1 0 0 0 0\n1 0 0 0\n1 0 0\n1 0\n1\n"
    with pytest.raises(PencilParseError, match="linearly dependent"):
        parse_pencil("# comment\n" + "\n".join([block] * 4))


def test_pencil_validation():
    with pytest.raises(ValueError):
        Pencil(np.zeros((3, 5, 5)))
    M = np.array(random_pencil(0).mats)
    M[1, 0, 1] += 1
    with pytest.raises(ValueError, match="symmetric"):
        Pencil(M)


def test_enclosure_contains_exact_values():
    P = Pencil.from_upper([Fraction(k + 1, 3 + k % 7) for k in range(60)])
    E = P.enclosure()
    iu = np.triu_indices(5)
    for b in range(4):
        for idx, (i, j) in enumerate(zip(*iu)):
            q = P.exact[b * 15 + idx]
            assert Fraction(float(E.lo[b, i, j])) <= q <= Fraction(float(E.hi[b, i, j]))


def test_recombined_keeps_exactness_and_is_linear():
    P = Pencil.from_upper([Fraction(k % 11 - 5, 1 + k % 3) for k in range(60)] )
    L = np.array([[1, 2, 0, 0], [0, 1, 1, 0], [1, 0, 0, 1], [0, 0, 1, 1]])
    Q = P.recombined(L)
    assert Q.exact is not None
    y = np.array([0.3, -1.2, 0.7, 2.0])
    np.testing.assert_allclose(eval_pencil(Q, y), eval_pencil(P, L @ y), atol=1e-12)


def test_rounded_is_exact_decimal_of_floats():
    P = random_pencil(5).rounded()
    assert P.exact is not None
    assert all(float(q) == v for q, v in zip(P.exact, upper_of(P.mats).ravel()))


def test_gradient_against_finite_differences(rng):
    P = random_pencil(2)
    for _ in range(10):
        p = rng.standard_normal(4)
        _, g = det_and_grad(P, p)
        h = 1e-6
        fd = np.array([(det_and_grad(P, p + h * e)[0] - det_and_grad(P, p - h * e)[0]) / (2 * h) for e in np.eye(4)])
        np.testing.assert_allclose(g, fd, rtol=1e-5, atol=1e-7 * np.abs(g).max())


def test_signature_and_semidefinite():
    assert signature(np.diag([1.0, 2, 0, 0, 3])) == (3, 0, 2)
    assert is_semidefinite(np.diag([1.0, 2, 0, 0, 3]))
    assert not is_semidefinite(np.diag([1.0, -2, 0, 0, 3]))


def test_grid_of_identity_pencil_gives_t_to_the_fifth():
    mats = np.zeros((4, 5, 5))
    mats[0] = np.eye(5)
    for k in range(1, 4):
        mats[k, 0, k] = mats[k, k, 0] = 1.0
    P = Pencil(mats)
    rows = grid_samples(P, [-2, 0, 0, 0], [2, 0, 0, 0], [9, 1, 1, 1])
    np.testing.assert_allclose(rows[:, 4], rows[:, 0] ** 5, atol=1e-12)
    np.testing.assert_allclose(rows[:, 5], rows[:, 0], atol=1e-12)
