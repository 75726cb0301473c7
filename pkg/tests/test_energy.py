from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumsetlab import (
    BudgetExceededError,
    DivisionDomainError,
    FamilySpec,
    dump_repfn_csv,
    energy,
    gen_family,
    load_repfn_csv,
    make_set,
    pair_set,
    pair_set_size,
    projection_count,
    rep_fn,
    transform,
)
from conftest import (
    int_sets,
    oracle_energy2,
    oracle_energy_k,
    oracle_projection,
    oracle_rep_counts,
    rational_sets,
)

A123 = make_set([1, 2, 3])


def test_pair_set_examples():
    assert pair_set(A123, A123, "sum").elements == (2, 3, 4, 5, 6)
    assert pair_set(A123, A123, "prod").elements == (1, 2, 3, 4, 6, 9)
    assert pair_set(make_set([7]), make_set([3]), "diff").elements == (4,)


def test_pair_set_ratio_zero_divisor_rejected():
    with pytest.raises(DivisionDomainError):
        pair_set(A123, make_set([0, 1]), "ratio")
    with pytest.raises(DivisionDomainError):
        rep_fn(A123, make_set([0, 1]), "ratio")


def test_rep_fn_examples():
    d = rep_fn(A123, A123, "diff")
    assert d.counts == {0: 3, 1: 2, -1: 2, 2: 1, -2: 1}
    s = rep_fn(A123, A123, "sum")
    assert s.counts == {2: 1, 3: 2, 4: 3, 5: 2, 6: 1}
    lone = rep_fn(make_set([5]), make_set([5]), "diff")
    assert lone.counts == {0: 1}


@settings(max_examples=60, deadline=None)
@given(rational_sets, rational_sets, st.sampled_from(["sum", "diff", "prod"]))
def test_rep_fn_matches_oracle_and_mass(A, B, op):
    f = rep_fn(A, B, op)
    assert f.counts == oracle_rep_counts(A.elements, B.elements, op)
    assert sum(f.counts.values()) == len(A) * len(B)
    assert f.support() == pair_set(A, B, op)


@settings(max_examples=30, deadline=None)
@given(rational_sets.filter(lambda s: 0 not in s.members), rational_sets)
def test_rep_fn_ratio_matches_oracle(B, A):
    f = rep_fn(A, B, "ratio")
    assert f.counts == oracle_rep_counts(A.elements, B.elements, "ratio")
    assert f.mass == len(A) * len(B)


@settings(max_examples=50, deadline=None)
@given(int_sets)
def test_difference_counts_are_symmetric(A):
    d = rep_fn(A, A, "diff")
    for x, c in d.counts.items():
        assert d.counts[-x] == c


def test_sum_counts_symmetric_for_symmetric_set():
    A = make_set([-5, -2, 0, 2, 5])  # symmetric about 0
    s = rep_fn(A, A, "sum")
    for x, c in s.counts.items():
        assert s.counts[-x] == c


def test_energy_examples():
    d = rep_fn(A123, A123, "diff")
    assert energy(d, 2).exact == 19
    assert energy(d, 3).exact == 45
    assert energy(d, 1).exact == 9
    assert energy(d, 0).exact == 5  # support size


def test_energy_fractional_matches_direct_float_sum():
    d = rep_fn(A123, A123, "diff")
    want = sum(c ** (12 / 7) for c in d.counts.values())
    assert energy(d, Fraction(12, 7)).approx == pytest.approx(want, rel=1e-14)
    assert energy(d, Fraction(12, 7)).exact is None


def test_energy_value_float_mirror():
    d = rep_fn(A123, A123, "diff")
    ev = energy(d, 3)
    assert ev.approx == float(ev.exact)
    assert float(ev) == ev.approx


def test_fractional_energy_meets_error_target():
    # documented contract: relative error <= 1e-12 for fractional exponents
    import mpmath
    import numpy as np

    A = gen_family(FamilySpec.random_subset(4 * 2000 * 2000, 2000, seed=13))
    d = rep_fn(A, A, "diff")
    got = energy(d, Fraction(12, 7)).approx
    uniq, mult = np.unique(d.counts_array, return_counts=True)
    with mpmath.workdps(40):
        ref = sum(int(m) * mpmath.mpf(int(u)) ** (mpmath.mpf(12) / 7)
                  for u, m in zip(uniq.tolist(), mult.tolist()))
        rel = abs(mpmath.mpf(got) - ref) / ref
        assert rel < 1e-12, mpmath.nstr(rel, 5)


def test_energy_rejects_negative_exponent():
    from sumsetlab import DomainError

    with pytest.raises(DomainError):
        energy(rep_fn(A123, A123, "diff"), -1)


@settings(max_examples=40, deadline=None)
@given(int_sets)
def test_energy_monotone_in_exponent(A):
    d = rep_fn(A, A, "diff")
    es = [energy(d, k).approx for k in (1, Fraction(3, 2), Fraction(12, 7), 2, Fraction(12, 5), 3)]
    for lo, hi in zip(es, es[1:]):
        assert lo <= hi * (1 + 1e-12)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-40, 40), min_size=1, max_size=8).map(make_set),
       st.lists(st.integers(-40, 40), min_size=1, max_size=8).map(make_set))
def test_energy2_matches_quadruple_enumeration(A, B):
    got = energy(rep_fn(A, B, "diff"), 2).exact
    assert got == oracle_energy2(A.elements, B.elements)


def test_energy2_oracle_at_size_thirty():
    import random

    rng = random.Random(30)
    A = make_set(rng.sample(range(-300, 300), 30))
    B = make_set(rng.sample(range(-300, 300), 30))
    assert energy(rep_fn(A, B, "diff"), 2).exact == oracle_energy2(A.elements, B.elements)


def test_energy2_oracle_on_rationals():
    A = make_set([Fraction(1, 3), Fraction(1, 2), 2, 3])
    B = make_set([Fraction(-1, 6), 1, Fraction(5, 2)])
    assert energy(rep_fn(A, B, "diff"), 2).exact == oracle_energy2(A.elements, B.elements)
    assert energy(rep_fn(A, B, "diff"), 3).exact == oracle_energy_k(A.elements, B.elements, 3)


@settings(max_examples=40, deadline=None)
@given(int_sets, st.integers(-20, 20).filter(lambda s: s != 0), st.integers(-30, 30),
       st.sampled_from([2, 3, Fraction(12, 7)]))
def test_energy_dilation_invariance(A, s, t, k):
    before = energy(rep_fn(A, A, "diff"), k)
    TA = transform(A, s, t)
    after = energy(rep_fn(TA, TA, "diff"), k)
    if before.exact is not None:
        assert before.exact == after.exact
    else:
        assert before.approx == pytest.approx(after.approx, rel=1e-12)


# -- projection counts --------------------------------------------------------

def test_projection_count_examples():
    P = make_set([-2, -1, 0, 1, 2])
    assert projection_count(P, P) == 19
    Q0 = make_set([0])
    A = make_set([3, 9, 17, 40])
    assert projection_count(A, Q0) == len(A)
    assert projection_count(make_set([0, 1]), make_set([5])) == 0


@settings(max_examples=40, deadline=None)
@given(int_sets, int_sets)
def test_projection_count_matches_oracle(P, Q):
    want = oracle_projection(P.elements, Q.elements)
    assert projection_count(P, Q) == want
    assert projection_count(P, Q, strategy="hash") == want
    assert projection_count(P, Q, strategy="poly") == want


@settings(max_examples=25, deadline=None)
@given(rational_sets, rational_sets)
def test_projection_count_rational_strategies_agree(P, Q):
    want = oracle_projection(P.elements, Q.elements)
    assert projection_count(P, Q, strategy="hash") == want
    assert projection_count(P, Q, strategy="poly") == want


def test_projection_count_budget_guard():
    A = gen_family(FamilySpec.gp(1, 2, 40))  # big ints: no polynomial path
    from sumsetlab import popular_differences

    P = popular_differences(A)
    with pytest.raises(BudgetExceededError):
        projection_count(P, P, budget=1000)


def test_projection_count_poly_handles_negatives_and_scales():
    P = make_set([Fraction(-7, 3), Fraction(1, 3), 4, Fraction(9, 2)])
    Q = make_set([Fraction(-8, 3), 0, Fraction(13, 6)])
    want = oracle_projection(P.elements, Q.elements)
    assert projection_count(P, Q, strategy="poly") == want


# -- pair set sizes ------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(rational_sets, rational_sets, st.sampled_from(["sum", "diff", "prod"]))
def test_pair_set_size_agrees_with_materialized(A, B, op):
    assert pair_set_size(A, B, op) == len(pair_set(A, B, op))


def test_pair_set_size_big_geometric():
    # powers of two: sums of pairs are distinct, products collapse to 2n-1
    A = gen_family(FamilySpec.gp(1, 2, 40))
    n = len(A)
    assert pair_set_size(A, A, "sum") == n * (n + 1) // 2
    assert pair_set_size(A, A, "prod") == 2 * n - 1
    assert pair_set_size(A, A, "diff") == n * (n - 1) + 1


def test_pair_set_size_fingerprint_path_matches_set_path():
    from sumsetlab.energy import _distinct_count_fingerprint

    A = gen_family(FamilySpec.random_subset(10_000, 150, seed=9))
    B = gen_family(FamilySpec.random_subset(10_000, 140, seed=10))
    for op in ("sum", "diff", "prod"):
        want = len({
            {"sum": lambda a, b: a + b,
             "diff": lambda a, b: a - b,
             "prod": lambda a, b: a * b}[op](a, b)
            for a in A for b in B
        })
        assert _distinct_count_fingerprint(A, B, op) == want
        same_want = len({
            {"sum": lambda a, b: a + b,
             "diff": lambda a, b: a - b,
             "prod": lambda a, b: a * b}[op](a, b)
            for a in A for b in A
        })
        assert _distinct_count_fingerprint(A, A, op) == same_want


def test_empty_sets():
    E = make_set([])
    assert pair_set(E, A123, "sum") == E
    assert pair_set_size(A123, E, "diff") == 0
    assert rep_fn(E, E, "sum").counts == {}
    assert projection_count(E, A123) == 0


# -- csv dump ------------------------------------------------------------------

def test_repfn_csv_roundtrip(tmp_path):
    f = rep_fn(make_set([Fraction(1, 2), 1, 3]), make_set([1, 2]), "diff")
    p = tmp_path / "rep.csv"
    dump_repfn_csv(f, p)
    text = p.read_text()
    assert text.splitlines()[0] == "value,count"
    assert load_repfn_csv(p) == f.counts


def test_repfn_csv_rejects_wrong_header(tmp_text):
    p = tmp_text("bad.csv", "a,b\n1,2\n")
    from sumsetlab import DomainError

    with pytest.raises(DomainError):
        load_repfn_csv(p)
