import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumsetlab import (
    CurveTranslate,
    DivisionDomainError,
    DomainError,
    Line,
    count_incidences_curve,
    count_incidences_lines,
    integer_line_family,
    make_set,
    read_lines_csv,
    st_ratio,
    transform,
    write_lines_csv,
)
from conftest import oracle_incidences

A123 = make_set([1, 2, 3])


def test_line_rejects_zero_slope():
    with pytest.raises(DivisionDomainError):
        Line(0, 3)


def test_diagonal_line_example():
    assert count_incidences_lines(A123, A123, [Line(1, 0)]) == 3


def test_two_line_example():
    # y = 2x only passes through (1, 2) on the 3x3 grid
    assert count_incidences_lines(A123, A123, [Line(1, 0), Line(2, 0)]) == 4


def test_no_lines_no_incidences():
    assert count_incidences_lines(A123, A123, []) == 0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-30, 30), min_size=1, max_size=12).map(make_set),
       st.lists(st.integers(-30, 30), min_size=1, max_size=12).map(make_set),
       st.lists(
           st.tuples(st.integers(-5, 5).filter(bool), st.integers(-40, 40)),
           max_size=25,
       ))
def test_integer_lines_match_oracle(A, B, raw):
    lines = [Line(m, c) for m, c in raw]
    assert count_incidences_lines(A, B, lines) == oracle_incidences(A, B, lines)


def test_rational_lines_match_oracle():
    rng = random.Random(11)
    for _ in range(20):
        A = make_set([Fraction(rng.randint(-40, 40), rng.randint(1, 4)) for _ in range(10)])
        B = make_set([Fraction(rng.randint(-40, 40), rng.randint(1, 4)) for _ in range(10)])
        lines = [
            Line(Fraction(rng.choice([-3, -1, 1, 2, 5]), rng.randint(1, 3)),
                 Fraction(rng.randint(-9, 9), rng.randint(1, 3)))
            for _ in range(12)
        ]
        assert count_incidences_lines(A, B, lines) == oracle_incidences(A, B, lines)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=15).map(make_set),
       st.lists(st.integers(-50, 50), min_size=1, max_size=15).map(make_set))
def test_trivial_incidence_upper_bound(A, B):
    lines = integer_line_family(4, 5)
    count = count_incidences_lines(A, B, lines)
    assert count <= len(lines) * min(len(A), len(B))


def test_incidence_dilation_invariance():
    A = make_set([1, 3, 4, 7])
    B = make_set([2, 5, 6, 9, 11])
    lines = [Line(2, 1), Line(-1, 8), Line(Fraction(1, 2), 3)]
    base = count_incidences_lines(A, B, lines)
    alpha, beta = Fraction(3), Fraction(5, 2)
    scaled_lines = [Line(l.slope * beta / alpha, l.intercept * beta) for l in lines]
    got = count_incidences_lines(
        transform(A, alpha, 0), transform(B, beta, 0), scaled_lines
    )
    assert got == base


def test_int64_and_generic_paths_agree():
    A = make_set(range(1, 30))
    B = make_set(range(1, 30))
    lines = integer_line_family(5, 29)
    fast = count_incidences_lines(A, B, lines)
    # shifting one set off the integers forces the generic loop
    A2 = transform(A, 1, Fraction(0))
    frac_lines = [Line(Fraction(l.slope), Fraction(l.intercept)) for l in lines]
    A_frac = make_set([Fraction(x) for x in A])
    assert count_incidences_lines(A_frac, B, frac_lines) == fast
    assert fast == oracle_incidences(A, B, lines)


# -- curve translates -----------------------------------------------------------

def test_curve_requires_convex_table():
    with pytest.raises(DomainError):
        CurveTranslate(make_set([1, 2, 3]), 0, 0)


def test_curve_translate_examples():
    squares = make_set([1, 4, 9])
    B = make_set([1, 4, 9])
    assert count_incidences_curve(3, B, [CurveTranslate(squares, 0, 0)]) == 3
    assert count_incidences_curve(3, B, [CurveTranslate(squares, 1, 0)]) == 2
    assert count_incidences_curve(3, B, []) == 0


def test_curve_translate_vertical_shift():
    squares = make_set([1, 4, 9, 16])
    B = make_set([0, 3, 8, 15])
    t = CurveTranslate(squares, 0, 1)  # y = x^2 - 1
    assert count_incidences_curve(4, B, [t]) == 4
    assert count_incidences_curve(2, B, [t]) == 2


def test_curve_out_of_range_arguments_do_not_count():
    squares = make_set([1, 4, 9])
    B = make_set([1, 4, 9])
    assert count_incidences_curve(10, B, [CurveTranslate(squares, 7, 0)]) == 3
    assert count_incidences_curve(10, B, [CurveTranslate(squares, 40, 0)]) == 0


# -- st ratio ---------------------------------------------------------------------

def test_st_ratio_example():
    assert st_ratio(3, 9, 1) == pytest.approx(0.5631953303613992, rel=1e-12)
    assert st_ratio(0, 100, 10) == 0.0


def test_st_ratio_domain():
    with pytest.raises(DomainError):
        st_ratio(1, 0, 5)
    with pytest.raises(DomainError):
        st_ratio(1, 5, 0)


def test_st_ratio_matches_naive_configuration():
    n = 12
    A = make_set(range(1, n + 1))
    fam = integer_line_family(3, n)
    count = count_incidences_lines(A, A, fam)
    assert count == oracle_incidences(A, A, fam)
    denom = (n * n * len(fam)) ** (2 / 3) + len(fam)
    assert st_ratio(count, n * n, len(fam)) == pytest.approx(count / denom)


# -- line files --------------------------------------------------------------------

def test_lines_csv_roundtrip(tmp_path):
    lines = [Line(1, 2), Line(Fraction(-3, 4), Fraction(1, 6))]
    p = tmp_path / "lines.csv"
    write_lines_csv(lines, p)
    assert read_lines_csv(p) == lines


def test_lines_csv_zero_slope_reports_line_number(tmp_text):
    p = tmp_text("z.csv", "slope,intercept\n1,2\n0,5\n")
    with pytest.raises(DivisionDomainError, match=":3"):
        read_lines_csv(p)


def test_lines_csv_bad_entry_reports_line_number(tmp_text):
    p = tmp_text("bad.csv", "2,x\n")
    with pytest.raises(DomainError, match=":1"):
        read_lines_csv(p)
