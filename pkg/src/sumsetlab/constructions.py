"""Popular/rich subset constructions and the triple counts they control.

The machinery here is the combinatorial core: density-threshold subsets of
difference and sum sets ("popular" values), the elements whose translates
hit those subsets in many points ("rich" elements), an iterated refinement
that stabilizes a fractional moment energy, dyadic level classes of a count
function, and two exact triple counts whose lower bounds carry explicit
constants derived from the inclusion-exclusion steps of the proofs they
implement:

  * difference side: popular threshold |A|^2 / (11 |A-A|), rich threshold
    2|A|/sqrt(11); popular mass >= (10/11)|A|^2, rich size > |A|/2,
    per-rich-element pair count >= (4/11)|A|^2, and the triple count
    >= (10/11 + 4/11 - 1) |A|^2 * |R| > (3/22)|A|^3.

  * sum side: popular threshold |X|^2 / (8 |X+X| log m) with m the ambient
    size, rich threshold (3/4)|X|; rich size >= (1 - 1/(2 log m))|X|, and
    triple count >= Delta * |P_Delta| * |B| / 2 from 3/4 + 3/4 - 1 = 1/2.

"log" always means the natural logarithm; nothing here depends on the base
except through absorbed constants, and `ambient_log` is the single place
that pins the convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceededError, DomainError
from .sets import FiniteSet
from .energy import EnergyValue, RepFn, energy, rep_fn

__all__ = [
    "ambient_log",
    "popular_differences",
    "popular_difference_mass",
    "rich_difference_elements",
    "popular_sums",
    "rich_sum_elements",
    "RefinementTrace",
    "refine_rich_core",
    "DyadicClass",
    "dominant_dyadic_class",
    "count_popular_difference_triples",
    "count_popular_sum_triples",
]

TWELVE_SEVENTHS = Fraction(12, 7)


def ambient_log(m: int | float) -> float:
    """Natural logarithm; the canonical 'log' for every threshold here."""
    return math.log(m)


# ---------------------------------------------------------------------------
# Popular values and rich elements
# ---------------------------------------------------------------------------

def popular_difference_mass(A: FiniteSet) -> tuple[FiniteSet, int]:
    """Popular differences together with their exact total count mass.

    Popular means count at least |A|^2 / (11 |A-A|); the comparison is the
    exact integer test 11 * count * |A-A| >= |A|^2, so no rounding can
    misclassify a value.  The returned mass is always >= (10/11)|A|^2.
    """
    if len(A) == 0:
        raise DomainError("popular_differences needs a nonempty set")
    d = rep_fn(A, A, "diff")
    n2 = len(A) ** 2
    support_size = d.size
    if d.is_numpy:
        c = d.counts_array
        # counts <= |A| and |A-A| <= |A|^2 keep this far inside int64
        mask = 11 * c * support_size >= n2
        mass = int(c[mask].sum())
        vals = d.values_array[mask].tolist()
        if d._scale != 1:
            from .sets import as_rational

            vals = [as_rational(Fraction(v, d._scale)) for v in vals]
        return FiniteSet._from_sorted(vals), mass
    picked = [(v, c) for v, c in sorted(d.counts.items()) if 11 * c * support_size >= n2]
    return (
        FiniteSet._from_sorted([v for v, _ in picked]),
        sum(c for _, c in picked),
    )


def popular_differences(A: FiniteSet) -> FiniteSet:
    """Differences with count at least |A|^2 / (11 |A-A|)."""
    return popular_difference_mass(A)[0]


def _shift_hit_counts(X: FiniteSet, P: FiniteSet, op: str) -> list[int]:
    """For each x in X, count b in X with (x - b) resp. (x + b) in P."""
    from .energy import _common_scaled

    com = _common_scaled(X, P)
    n = len(X)
    if com is not None and n > 0 and len(P) > 0:
        xa = com[0]
        ps = np.sort(com[1])
        m = xa[:, None] - xa[None, :] if op == "diff" else xa[:, None] + xa[None, :]
        idx = np.searchsorted(ps, m)
        idx[idx == ps.size] = ps.size - 1
        hit = ps[idx] == m
        return hit.sum(axis=1).tolist()
    members = P.members
    if op == "diff":
        return [sum(1 for b in X.elements if x - b in members) for x in X.elements]
    return [sum(1 for b in X.elements if x + b in members) for x in X.elements]


def rich_difference_elements(A: FiniteSet, P: FiniteSet) -> FiniteSet:
    """Elements x of A with |(x - A) & P| >= 2|A|/sqrt(11).

    The irrational threshold is tested by squaring: 11 c^2 >= 4 |A|^2
    (both sides nonnegative, boundary counted as rich).
    """
    n = len(A)
    counts = _shift_hit_counts(A, P, "diff")
    keep = [x for x, c in zip(A.elements, counts) if 11 * c * c >= 4 * n * n]
    return FiniteSet._from_sorted(keep)


def _sum_popular_mask(counts: np.ndarray, n: int, support: int, ambient: int):
    """Boolean mask of sigma counts meeting n^2 / (8 support log ambient).

    Float comparison with an exact high-precision fallback whenever a count
    sits within 1e-9 (relative) of the threshold.  The threshold is
    irrational (rational / log m), so sufficient precision always separates.
    """
    thr = n * n / (8.0 * support * ambient_log(ambient))
    c = counts.astype(np.float64)
    mask = c >= thr
    near = np.abs(c - thr) <= 1e-9 * max(1.0, thr)
    if near.any():
        import mpmath

        with mpmath.workdps(60):
            t = mpmath.mpf(n * n) / (8 * support * mpmath.log(ambient))
            for i in np.nonzero(near)[0]:
                mask[i] = mpmath.mpf(int(counts[i])) >= t
    return mask


def popular_sums(X: FiniteSet, ambient_size: int) -> FiniteSet:
    """Sums with count at least |X|^2 / (8 |X+X| log(ambient_size))."""
    if ambient_size < 3:
        raise DomainError("ambient size must be >= 3 so that log exceeds 1")
    if len(X) == 0:
        raise DomainError("popular_sums needs a nonempty set")
    s = rep_fn(X, X, "sum")
    mask = _sum_popular_mask(s.counts_array, len(X), s.size, ambient_size)
    if s.is_numpy:
        from .sets import as_rational

        vals = s.values_array[mask].tolist()
        if s._scale != 1:
            vals = [as_rational(Fraction(v, s._scale)) for v in vals]
        return FiniteSet._from_sorted(vals)
    vals_sorted = s._sorted_py_values()
    out = [v for v, ok in zip(vals_sorted, mask.tolist()) if ok]
    return FiniteSet._from_sorted(out)


def rich_sum_elements(X: FiniteSet, P: FiniteSet) -> FiniteSet:
    """Elements x of X with |(X + x) & P| >= (3/4)|X| (exact test 4c >= 3|X|)."""
    n = len(X)
    counts = _shift_hit_counts(X, P, "sum")
    keep = [x for x, c in zip(X.elements, counts) if 4 * c >= 3 * n]
    return FiniteSet._from_sorted(keep)


# ---------------------------------------------------------------------------
# Iterated refinement
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RefinementTrace:
    """Audit trail of the refinement: nested iterates plus why it stopped."""

    iterates: tuple[FiniteSet, ...]
    stop_reason: str  # "energy-criterion-met" | "iteration-guard" | "set-too-small"


def refine_rich_core(A: FiniteSet) -> tuple[FiniteSet, RefinementTrace]:
    """Iterate X -> rich_sum_elements(X) until the 12/7 moment stabilizes.

    Returns the first iterate B whose rich refinement satisfies
    E_{12/7}(rich(B)) >= E_{12/7}(B) / log|A|.  The criterion is guaranteed
    only for large ambient sets, so two guards keep small inputs
    well-defined: at most floor(log|A|) refinements (stop reason
    "iteration-guard", returning the last iterate), and an early stop if an
    iterate falls to at most half of |A| ("set-too-small").
    """
    n = len(A)
    if n < 3:
        raise DomainError("refinement requires |A| >= 3")
    log_n = ambient_log(n)
    guard = math.floor(log_n)
    iterates = [A]
    X = A
    for step in range(guard + 1):
        R = rich_sum_elements(X, popular_sums(X, n))
        e_right = energy(rep_fn(X, X, "diff"), TWELVE_SEVENTHS).approx / log_n
        e_rich = energy(rep_fn(R, R, "diff"), TWELVE_SEVENTHS).approx
        if e_rich >= e_right:
            return X, RefinementTrace(tuple(iterates), "energy-criterion-met")
        if step == guard:
            return X, RefinementTrace(tuple(iterates), "iteration-guard")
        X = R
        iterates.append(X)
        if 2 * len(X) <= n:
            return X, RefinementTrace(tuple(iterates), "set-too-small")
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# Dyadic level classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DyadicClass:
    """One dyadic level of a count function: values with count in [level, 2*level).

    level is a power of two (classes are anchored at 2**0) and weighted_mass
    is the k-th moment restricted to the class.  The selected class always
    satisfies weighted_mass * (number of occupied levels) >= E_k.
    """

    level: int
    members: FiniteSet
    weighted_mass: EnergyValue
    exponent: float

    @property
    def size(self) -> int:
        return len(self.members)


def dominant_dyadic_class(f: RepFn, k) -> DyadicClass:
    """The level class maximizing its k-weighted mass (ties: smaller level).

    Classes are [2^j, 2^{j+1}) for j >= 0; every support value lies in
    exactly one, and there are at most floor(log2(max count)) + 1 of them,
    which yields the pigeonhole guarantee quoted above.
    """
    if f.size == 0:
        raise DomainError("dyadic class selection needs a nonempty count function")
    counts = f.counts_array
    # counts stay below 2^53, so float log2 followed by floor is exact
    j = (np.floor(np.log2(counts.astype(np.float64)))).astype(np.int64)
    kr = Fraction(k) if not isinstance(k, float) else k
    integral = (isinstance(kr, Fraction) and kr.denominator == 1) or (
        isinstance(kr, float) and kr.is_integer()
    )
    best_j = -1
    best_mass_f = -1.0
    best_mass_exact: int | None = None
    for jv in np.unique(j).tolist():
        sel = counts[j == jv]
        if integral:
            ki = int(kr)
            uniq, mult = np.unique(sel, return_counts=True)
            exact = sum(int(m) * int(u) ** ki for u, m in zip(uniq.tolist(), mult.tolist()))
            mass_f = float(exact)
        else:
            exact = None
            mass_f = float(np.sum(np.power(sel.astype(np.float64), float(kr))))
        if mass_f > best_mass_f:
            best_j, best_mass_f, best_mass_exact = jv, mass_f, exact
    sel_mask = j == best_j
    if f.is_numpy:
        from .sets import as_rational

        vals = f.values_array[sel_mask].tolist()
        if f._scale != 1:
            vals = [as_rational(Fraction(v, f._scale)) for v in vals]
        members = FiniteSet._from_sorted(vals)
    else:
        vals_sorted = f._sorted_py_values()
        members = FiniteSet._from_sorted(
            [v for v, ok in zip(vals_sorted, sel_mask.tolist()) if ok]
        )
    return DyadicClass(
        level=1 << int(best_j),
        members=members,
        weighted_mass=EnergyValue(best_mass_exact, best_mass_f),
        exponent=float(kr),
    )


# ---------------------------------------------------------------------------
# Exact triple counts
# ---------------------------------------------------------------------------

def _bitmask_rows(bool_rows: np.ndarray) -> list[int]:
    """Pack boolean matrix rows into Python-int bitmasks (bit i = column i)."""
    packed = np.packbits(bool_rows, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def count_popular_difference_triples(A: FiniteSet, *, size_guard: int = 1000) -> int:
    """#{(r, a1, a2) in R x A x A : r-a1, r-a2, a1-a2 all popular differences}.

    R is the rich-difference subset.  Cubic cost, so guarded by size;
    override size_guard to push past the default 1000.
    """
    n = len(A)
    if n > size_guard:
        raise BudgetExceededError(
            f"|A| = {n} exceeds the cubic-count size guard {size_guard}"
        )
    if n == 0:
        raise DomainError("triple count needs a nonempty set")
    P = popular_differences(A)
    R = rich_difference_elements(A, P)

    from .energy import _common_scaled

    com = _common_scaled(A, P)
    if com is not None and len(P) > 0:
        aa = com[0]
        ps = np.sort(com[1])

        def member_matrix(left: np.ndarray) -> np.ndarray:
            m = left[:, None] - aa[None, :]
            idx = np.searchsorted(ps, m)
            idx[idx == ps.size] = ps.size - 1
            return ps[idx] == m

        pair_ok = member_matrix(aa)  # [a1, a2]: a1 - a2 popular
        r_sel = np.array([x in R.members for x in A.elements], dtype=bool)
        shift_ok = member_matrix(aa[r_sel])  # [r, a]: r - a popular
        # float64 matmul on 0/1 matrices is exact: every partial sum is an
        # integer below 2^53 for n <= guard
        t = shift_ok.astype(np.float64)
        inner = t @ pair_ok.astype(np.float64)
        total = float(np.sum(inner * t))
        return int(round(total))

    # big-integer / rational fallback: per-row bitmasks over A's index space
    members = P.members
    elems = A.elements
    pair_rows = np.zeros((n, n), dtype=bool)
    for i, a1 in enumerate(elems):
        row = pair_rows[i]
        for jdx, a2 in enumerate(elems):
            row[jdx] = (a1 - a2) in members
    col_masks = _bitmask_rows(pair_rows.T)  # mask over a1 for each a2
    total = 0
    for r in R.elements:
        t_bits = 0
        t_idx = []
        for i, a in enumerate(elems):
            if (r - a) in members:
                t_bits |= 1 << i
                t_idx.append(i)
        total += sum((t_bits & col_masks[i2]).bit_count() for i2 in t_idx)
    return total


def count_popular_sum_triples(
    B: FiniteSet, ambient_size: int, *, size_guard: int = 1000
) -> tuple[int, int, int]:
    """Exact sum-side triple count together with its dyadic class data.

    Returns (count, level, class_size) where (level, class_size) come from
    the dominant 12/7-weighted dyadic class of the rich subset's difference
    counts, and count = #{(r1, r2, b) in R x R x B : r1+b and r2+b popular
    sums, r1-r2 in the class}.
    """
    n = len(B)
    if n > size_guard:
        raise BudgetExceededError(
            f"|B| = {n} exceeds the cubic-count size guard {size_guard}"
        )
    if n == 0:
        raise DomainError("triple count needs a nonempty set")
    P = popular_sums(B, ambient_size)
    R = rich_sum_elements(B, P)
    dclass = dominant_dyadic_class(rep_fn(R, R, "diff"), TWELVE_SEVENTHS)
    pd_members = dclass.members.members

    p_members = P.members
    elems = B.elements
    x_masks = []
    for r in R.elements:
        bits = 0
        for i, b in enumerate(elems):
            if (r + b) in p_members:
                bits |= 1 << i
        x_masks.append(bits)
    total = 0
    relems = R.elements
    for i1, r1 in enumerate(relems):
        m1 = x_masks[i1]
        for i2, r2 in enumerate(relems):
            if (r1 - r2) in pd_members:
                total += (m1 & x_masks[i2]).bit_count()
    return total, dclass.level, len(dclass.members)
