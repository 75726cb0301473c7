from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumsetlab import (
    FamilySpec,
    FiniteSet,
    DomainError,
    InfeasibleSpecError,
    InvalidScaleError,
    gen_family,
    intersect_dilate,
    is_convex,
    make_set,
    read_set_file,
    transform,
    write_set_file,
)
from conftest import rational_sets


def test_make_set_dedup_and_sort():
    assert make_set([3, 1, 2, 2]).elements == (1, 2, 3)


def test_make_set_empty():
    assert len(make_set([])) == 0


def test_make_set_canonical_rational_equality():
    assert make_set([Fraction(1, 2), Fraction(2, 4)]).elements == (Fraction(1, 2),)


def test_make_set_rejects_floats():
    with pytest.raises(TypeError):
        make_set([0.5])


def test_membership_is_exact():
    A = make_set([Fraction(1, 3), 2])
    assert Fraction(1, 3) in A
    assert Fraction(2, 6) in A
    assert 2 in A
    assert Fraction(1, 2) not in A


def test_transform_dilation():
    assert transform(make_set([1, 2, 3]), 2, 0).elements == (2, 4, 6)


def test_transform_translation():
    assert transform(make_set([1, 2, 3]), 1, -2).elements == (-1, 0, 1)


def test_transform_negation():
    assert transform(make_set([1, 2, 3]), -1, 0).elements == (-3, -2, -1)


def test_transform_zero_scale_rejected():
    with pytest.raises(InvalidScaleError):
        transform(make_set([1]), 0, 1)


@settings(max_examples=60, deadline=None)
@given(rational_sets, st.fractions(max_denominator=6).filter(lambda s: s != 0),
       st.fractions(max_denominator=6))
def test_transform_is_a_bijection(A, s, t):
    out = transform(A, s, t)
    assert len(out) == len(A)
    back = transform(out, Fraction(1) / s, -Fraction(t) / s)
    assert back == A


@settings(max_examples=40, deadline=None)
@given(rational_sets, st.fractions(min_value="1/5", max_value=9, max_denominator=5),
       st.fractions(max_denominator=5))
def test_convexity_invariant_under_positive_affine(A, s, t):
    assert is_convex(transform(A, s, t)) == is_convex(A)


def test_intersect_dilate_examples():
    assert intersect_dilate(make_set([1, 2, 4]), 2).elements == (1, 2)
    assert intersect_dilate(make_set([1, 3]), 2).elements == ()
    A = make_set([1, 5, 11])
    assert intersect_dilate(A, 1) == A
    with pytest.raises(InvalidScaleError):
        intersect_dilate(A, 0)


def test_is_convex_examples():
    assert is_convex(make_set([1, 4, 9, 16]))
    assert not is_convex(make_set([1, 2, 3]))
    assert is_convex(make_set([5]))
    assert is_convex(make_set([]))
    assert is_convex(make_set([2, 7]))


# -- families ----------------------------------------------------------------

def test_ap_family():
    assert gen_family(FamilySpec.ap(1, 1, 3)).elements == (1, 2, 3)
    assert gen_family(FamilySpec.ap(5, -2, 3)).elements == (1, 3, 5)


def test_gp_family():
    assert gen_family(FamilySpec.gp(1, 2, 4)).elements == (1, 2, 4, 8)
    assert len(gen_family(FamilySpec.gp(3, Fraction(1, 2), 5))) == 5


def test_convex_power_family():
    A = gen_family(FamilySpec.convex_power(2, 4))
    assert A.elements == (1, 4, 9, 16)
    assert is_convex(A)


@pytest.mark.parametrize("n", [2, 5, 17, 64])
def test_convex_power_is_convex(n):
    for k in (2, 3):
        assert is_convex(gen_family(FamilySpec.convex_power(k, n)))


def test_convex_custom_family():
    A = gen_family(FamilySpec.convex_custom(7, 30))
    assert len(A) == 30
    assert is_convex(A)
    assert A == gen_family(FamilySpec.convex_custom(7, 30))


def test_random_subset_contract():
    spec = FamilySpec.random_subset(1000, 40, seed=3)
    A = gen_family(spec)
    assert len(A) == 40
    assert all(isinstance(x, int) and 1 <= x <= 1000 for x in A)
    assert A == gen_family(spec)
    assert A != gen_family(FamilySpec.random_subset(1000, 40, seed=4))


def test_random_subset_exhaustive_range():
    # N == n forces the rejection sampler to hit every value
    assert gen_family(FamilySpec.random_subset(6, 6, seed=0)).elements == tuple(range(1, 7))


def test_random_subset_infeasible():
    with pytest.raises(InfeasibleSpecError):
        gen_family(FamilySpec.random_subset(5, 9))


def test_perturbed_family():
    base = FamilySpec.ap(1, 1, 12)
    spec = FamilySpec.perturbed(base, 12, seed=1)
    A = gen_family(spec)
    assert len(A) == 12
    assert A == gen_family(spec)
    ints = gen_family(base)
    # each element moved by less than a quarter gap, order undisturbed
    for orig, moved in zip(ints.elements, A.elements):
        assert 0 <= moved - orig < Fraction(1, 4)


def test_family_spec_validation():
    with pytest.raises(DomainError):
        FamilySpec.ap(1, 0, 5)
    with pytest.raises(DomainError):
        FamilySpec.gp(1, 1, 5)
    with pytest.raises(DomainError):
        FamilySpec.gp(0, 2, 5)
    with pytest.raises(DomainError):
        FamilySpec.convex_power(1, 5)
    with pytest.raises(DomainError):
        FamilySpec("AP", (1, 1), 0)


@pytest.mark.parametrize(
    "label",
    ["AP(1,1)", "GP(2,-3)", "ConvexPower(2)", "ConvexCustom(9)",
     "RandomSubset(400,7)", "Perturbed(GP(1,2),5)", "AP(1/2,3/4)"],
)
def test_family_spec_parse_roundtrip(label):
    spec = FamilySpec.parse(label, 8)
    assert spec.label() == label
    assert FamilySpec.parse(spec.label(), 8) == spec


def test_family_spec_parse_rejects_garbage():
    with pytest.raises(DomainError):
        FamilySpec.parse("Fibonacci(1,1)", 4)
    with pytest.raises(DomainError):
        FamilySpec.parse("AP(1)", 4)


# -- files -------------------------------------------------------------------

def test_set_file_roundtrip(tmp_path):
    A = make_set([Fraction(-3, 4), 0, 5, Fraction(22, 7)])
    path = tmp_path / "a.txt"
    write_set_file(A, path)
    assert read_set_file(path) == A


def test_set_file_comments_and_blanks(tmp_text):
    p = tmp_text("s.txt", "# header\n1\n\n2/4\n# trailing\n-3\n")
    assert read_set_file(p).elements == (-3, Fraction(1, 2), 1)


def test_set_file_bad_line_reports_position(tmp_text):
    p = tmp_text("bad.txt", "1\nnope\n")
    with pytest.raises(DomainError, match=":2"):
        read_set_file(p)


def test_finiteset_pickles_and_hashes():
    import pickle

    A = make_set([1, Fraction(1, 2)])
    B = pickle.loads(pickle.dumps(A))
    assert B == A and hash(B) == hash(A)
    assert FiniteSet([2, 1]) == FiniteSet([1, 2, 2])
