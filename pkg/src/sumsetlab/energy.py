"""Pair sets, representation functions, moment energies, projection counts.

All counting here is exact.  The workhorse layout: a set's scaled-integer
view (see `sets._IntView`) lets the common all-integer case run through
int64 numpy kernels, while arbitrary rationals and huge integers (geometric
families reach 2**n) fall back to hashed big-integer counting.  Counting is
O(|A||B|) hash/vector accumulation; there is no approximate or FFT-float
path anywhere, because every downstream inequality check treats these
counts as exact combinatorial quantities.

`projection_count` additionally has an exact big-integer polynomial
correlation fast path for integer sets of moderate span: the difference
count function of a set is read off the coefficients of X(t) * X~(t) where
X is the 0/1 generating polynomial, evaluated with integer limb packing.
That is still exact integer arithmetic, merely faster than the quadratic
hash loop; sets whose span is too large use the hash loop under a work
budget.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import BudgetExceededError, DivisionDomainError, DomainError
from .sets import FiniteSet, Rational, as_rational

try:  # gmpy2 multiplies multi-megabit integers far faster than CPython
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _mpz = int

__all__ = [
    "PAIR_OPS",
    "RepFn",
    "EnergyValue",
    "pair_set",
    "pair_set_size",
    "rep_fn",
    "energy",
    "projection_count",
    "dump_repfn_csv",
    "load_repfn_csv",
]

PAIR_OPS = ("sum", "diff", "prod", "ratio")

_INT64_SAFE = 1 << 62
# Above this scaled span the polynomial-correlation path would build
# integers past ~128 Mbit; the hash loop (with budget) takes over.
_POLY_SPAN_LIMIT = 4_194_304


def _require_op(op: str) -> None:
    if op not in PAIR_OPS:
        raise DomainError(f"op must be one of {PAIR_OPS}, got {op!r}")


class RepFn:
    """Representation function of a pair-set operation.

    counts(x) = number of ordered pairs (a, b) in A x B with a op b = x.
    Total mass is always |A| * |B|.  Storage is either aligned arrays
    (scaled int64 values + counts, the numpy fast path) or a plain dict of
    exact values.  Array-mode values may be held as a sorted raw array plus
    run starts and materialized only when someone actually asks for them;
    moment energies touch counts alone, which keeps the n**2-sized value
    gather off the hot path.
    """

    __slots__ = (
        "op", "left_size", "right_size",
        "_vals_arr", "_scale", "_vals_py", "_counts_arr", "_dict",
        "_flat", "_starts", "_numpy_mode",
    )

    def __init__(self, op, left_size, right_size, *, vals_arr=None, scale=1,
                 vals_py=None, counts_arr=None, counts_dict=None,
                 flat=None, starts=None):
        self.op = op
        self.left_size = left_size
        self.right_size = right_size
        # counts stay within fixed-width integers at any feasible desk scale
        assert left_size * right_size < (1 << 63)
        self._vals_arr = vals_arr
        self._scale = scale
        self._vals_py = vals_py
        self._counts_arr = counts_arr
        self._dict = counts_dict
        self._flat = flat
        self._starts = starts
        self._numpy_mode = counts_dict is None

    # -- basic shape ---------------------------------------------------------

    @property
    def is_numpy(self) -> bool:
        """True when values are held as scaled int64 arrays."""
        return self._numpy_mode

    @property
    def size(self) -> int:
        """Support size: |A op B|."""
        if self._counts_arr is not None:
            return int(self._counts_arr.size)
        return len(self._dict)

    @property
    def mass(self) -> int:
        return self.left_size * self.right_size

    @property
    def counts_array(self) -> np.ndarray:
        """Counts as int64, aligned with the (sorted) support."""
        if self._counts_arr is None:
            self._counts_arr = np.fromiter(
                (self._dict[v] for v in self._sorted_py_values()),
                dtype=np.int64, count=len(self._dict),
            )
        return self._counts_arr

    @property
    def values_array(self) -> np.ndarray | None:
        """Sorted scaled values (int64), or None in dict mode."""
        if self._vals_arr is None and self._flat is not None:
            self._vals_arr = self._flat[self._starts]
            self._flat = None
            self._starts = None
        return self._vals_arr

    def _sorted_py_values(self):
        if self._vals_py is None:
            self._vals_py = sorted(self._dict)
        return self._vals_py

    @property
    def counts(self) -> dict:
        """Exact value -> count mapping (materialized lazily)."""
        if self._dict is None:
            vals = self._unscaled_values()
            self._dict = dict(zip(vals, self._counts_arr.tolist()))
        return self._dict

    def _unscaled_values(self) -> list:
        if self._vals_py is not None:
            return self._vals_py
        s = self._scale
        raw = self.values_array.tolist()
        if s == 1:
            self._vals_py = raw
        else:
            self._vals_py = [as_rational(Fraction(v, s)) for v in raw]
        return self._vals_py

    def get(self, x) -> int:
        """Count for one value (0 when outside the support)."""
        if self._dict is not None:
            return self._dict.get(as_rational(x), 0)
        sx = as_rational(as_rational(x) * self._scale)
        if not isinstance(sx, int):
            return 0
        va = self.values_array
        if va.size == 0 or not int(va[0]) <= sx <= int(va[-1]):
            return 0
        i = int(np.searchsorted(va, sx))
        if i < va.size and int(va[i]) == sx:
            return int(self._counts_arr[i])
        return 0

    def items(self) -> Iterator[tuple[Rational, int]]:
        if self._dict is not None:
            return iter(self._dict.items())
        return zip(self._unscaled_values(), self._counts_arr.tolist())

    def support(self) -> FiniteSet:
        """The pair set itself, as a FiniteSet."""
        return FiniteSet._from_sorted(self._unscaled_values())


def _abs_bound(ints: list[int]) -> int:
    return max(abs(ints[0]), abs(ints[-1])) if ints else 0


def _common_scaled(A: FiniteSet, B: FiniteSet):
    """int64 views of A and B brought to a common denominator, or None."""
    iva, ivb = A.int_view, B.int_view
    if iva.arr is None or ivb.arr is None:
        return None
    s = iva.scale * ivb.scale // math.gcd(iva.scale, ivb.scale)
    ma, mb = s // iva.scale, s // ivb.scale
    if _abs_bound(iva.ints) * ma + _abs_bound(ivb.ints) * mb >= _INT64_SAFE:
        return None
    return iva.arr * ma if ma != 1 else iva.arr, ivb.arr * mb if mb != 1 else ivb.arr, s


def _outer_values(A: FiniteSet, B: FiniteSet, op: str):
    """All |A||B| operation values: (int array, scale) or (list, 1)."""
    if op in ("sum", "diff"):
        com = _common_scaled(A, B)
        if com is not None:
            a, b, s = com
            if a.size and b.size and _abs_bound([int(a[0]), int(a[-1])]) \
                    + _abs_bound([int(b[0]), int(b[-1])]) < (1 << 31):
                # results fit int32: half the memory traffic in the sort
                a = a.astype(np.int32)
                b = b.astype(np.int32)
            m = a[:, None] + b[None, :] if op == "sum" else a[:, None] - b[None, :]
            return m.ravel(), s
    elif op == "prod":
        iva, ivb = A.int_view, B.int_view
        if iva.arr is not None and ivb.arr is not None:
            if _abs_bound(iva.ints) * _abs_bound(ivb.ints) < _INT64_SAFE:
                return (iva.arr[:, None] * ivb.arr[None, :]).ravel(), iva.scale * ivb.scale

    # exact fallback: python objects (big ints / Fractions)
    if op == "sum":
        vals = [a + b for a in A.elements for b in B.elements]
    elif op == "diff":
        vals = [a - b for a in A.elements for b in B.elements]
    elif op == "prod":
        vals = [a * b for a in A.elements for b in B.elements]
    else:  # ratio
        if 0 in B.members:
            raise DivisionDomainError("ratio set requires 0 not in divisor set")
        vals = [as_rational(Fraction(a) / b) for a in A.elements for b in B.elements]
    return vals, 1


# spans up to this get the linear histogram kernel instead of a sort
_BINCOUNT_SPAN_LIMIT = 16_777_216


def _repfn_from_flat(op, nl, nr, flat: np.ndarray, scale: int,
                     lo: int | None, hi: int | None) -> RepFn:
    """Aggregate a raw array of outcome values into a RepFn.

    Small-span integer data goes through one np.bincount pass; anything
    else is sorted in place and run-length encoded, deferring the value
    gather until somebody asks for support values.
    """
    if flat.size == 0:
        return RepFn(op, nl, nr, vals_arr=flat, scale=scale,
                     counts_arr=np.array([], dtype=np.int64))
    if lo is not None and hi - lo <= _BINCOUNT_SPAN_LIMIT and hi - lo <= 16 * flat.size:
        hist = np.bincount(flat - lo, minlength=hi - lo + 1)
        vals = np.flatnonzero(hist)
        cnt = hist[vals]
        return RepFn(op, nl, nr, vals_arr=(vals + lo), scale=scale,
                     counts_arr=cnt.astype(np.int64))
    flat.sort()
    keep = np.empty(flat.size, dtype=bool)
    keep[0] = True
    np.not_equal(flat[1:], flat[:-1], out=keep[1:])
    starts = np.flatnonzero(keep)
    cnt = np.empty(starts.size, dtype=np.int64)
    np.subtract(starts[1:], starts[:-1], out=cnt[:-1])
    cnt[-1] = flat.size - starts[-1]
    return RepFn(op, nl, nr, scale=scale, counts_arr=cnt, flat=flat, starts=starts)


def rep_fn(A: FiniteSet, B: FiniteSet, op: str) -> RepFn:
    """Representation function of A op B.

    counts(x) = #{(a, b) in A x B : a op b = x}; sum of counts is |A||B|.
    """
    _require_op(op)
    if op == "ratio" and 0 in B.members:
        raise DivisionDomainError("ratio set requires 0 not in divisor set")
    vals, scale = _outer_values(A, B, op)
    if isinstance(vals, np.ndarray):
        lo = hi = None
        if op in ("sum", "diff") and vals.size:
            # exact result bounds come straight from the operand extremes
            com = _common_scaled(A, B)
            a, b, _ = com
            if op == "sum":
                lo, hi = int(a[0] + b[0]), int(a[-1] + b[-1])
            else:
                lo, hi = int(a[0] - b[-1]), int(a[-1] - b[0])
        return _repfn_from_flat(op, len(A), len(B), vals, scale, lo, hi)
    d: dict = {}
    for v in vals:
        v = as_rational(v)
        d[v] = d.get(v, 0) + 1
    return RepFn(op, len(A), len(B), counts_dict=d)


def pair_set(A: FiniteSet, B: FiniteSet, op: str) -> FiniteSet:
    """The exact set {a op b : a in A, b in B} (materialized)."""
    _require_op(op)
    vals, scale = _outer_values(A, B, op)
    if isinstance(vals, np.ndarray):
        uniq = np.unique(vals).tolist()
        if scale != 1:
            uniq = [as_rational(Fraction(v, scale)) for v in uniq]
        return FiniteSet._from_sorted(uniq)
    return FiniteSet(vals)


def _pair_value(a, b, op):
    if op == "sum":
        return a + b
    if op == "diff":
        return a - b
    if op == "prod":
        return a * b
    return as_rational(Fraction(a) / b)


# 62-bit prime (2**62 - 57).  Python's own int hash reduces mod 2**61 - 1,
# under which powers of two collide in large structured classes (2**61 == 2),
# so geometric families would defeat a hash-based fingerprint.
_FP_PRIME = 4611686018427387847


def _fingerprint(v) -> int:
    if isinstance(v, Fraction):
        return hash(v)
    return int(v % _FP_PRIME) - (_FP_PRIME >> 1)


def _distinct_count_fingerprint(A: FiniteSet, B: FiniteSet, op: str) -> int:
    """Exact distinct count of {a op b} for operand values too big for int64.

    Hash fingerprints give a linear-memory equality prefilter (equal values
    always share a fingerprint); every colliding fingerprint group is then
    re-resolved with the exact big-integer values, so the result is exact.
    When A and B are the same set, sums/products enumerate only i <= j and
    differences count 2 * #distinct positive differences + 1, which removes
    the guaranteed symmetric duplicates before hashing.
    """
    same = A is B or A == B
    ae, be = A.elements, (A.elements if same else B.elements)
    if (
        _mpz is not int
        and op != "ratio"
        and all(isinstance(x, int) for x in ae)
        and (same or all(isinstance(x, int) for x in be))
    ):
        # gmpy2 keeps hash() equal to the int hash but multiplies far faster
        ae = [_mpz(x) for x in ae]
        be = ae if same else [_mpz(x) for x in be]
    n, m = len(ae), len(be)
    if same and op in ("sum", "prod"):
        total = n * (n + 1) // 2
        ii = np.empty(total, dtype=np.int32)
        jj = np.empty(total, dtype=np.int32)
        k = 0
        for i in range(n):
            cnt = n - i
            ii[k : k + cnt] = i
            jj[k : k + cnt] = np.arange(i, n, dtype=np.int32)
            k += cnt
    elif same and op == "diff":
        # difference sets are symmetric with 0 present: count positives only
        total = n * (n - 1) // 2
        if total == 0:
            return 1
        ii = np.empty(total, dtype=np.int32)
        jj = np.empty(total, dtype=np.int32)
        k = 0
        for i in range(1, n):
            ii[k : k + i] = i
            jj[k : k + i] = np.arange(i, dtype=np.int32)
            k += i
    else:
        ii = np.repeat(np.arange(n, dtype=np.int32), m)
        jj = np.tile(np.arange(m, dtype=np.int32), n)
        total = n * m

    # fill row-by-row in the same order ii/jj were laid out
    fps = np.empty(total, dtype=np.int64)
    k = 0
    for i in range(n):
        if same and op in ("sum", "prod"):
            cols = range(i, n)
        elif same and op == "diff":
            if i == 0:
                continue
            cols = range(i)
        else:
            cols = range(m)
        a = ae[i]
        hashes = [_fingerprint(_pair_value(a, be[j], op)) for j in cols]
        fps[k : k + len(hashes)] = hashes
        k += len(hashes)

    order = np.argsort(fps, kind="stable")
    sfp = fps[order]
    boundary = np.empty(total, dtype=bool)
    boundary[0] = True
    np.not_equal(sfp[1:], sfp[:-1], out=boundary[1:])
    starts = np.flatnonzero(boundary)
    distinct = int(starts.size)
    run_ends = np.append(starts[1:], total)
    long_runs = np.flatnonzero(run_ends - starts > 1)
    for r in long_runs.tolist():
        seen = set()
        for pos in order[starts[r] : run_ends[r]].tolist():
            seen.add(_pair_value(ae[ii[pos]], be[jj[pos]], op))
        distinct += len(seen) - 1
    if same and op == "diff":
        return 2 * distinct + 1
    return distinct


def pair_set_size(A: FiniteSet, B: FiniteSet, op: str) -> int:
    """|A op B| without materializing the pair set when it would be huge.

    Uses the int64 unique kernel when possible; big-magnitude sets (e.g.
    geometric families reaching 2**n) go through an exact fingerprint
    counter with linear memory instead of a value dictionary.
    """
    _require_op(op)
    if len(A) == 0 or len(B) == 0:
        return 0
    if op == "ratio" and 0 in B.members:
        raise DivisionDomainError("ratio set requires 0 not in divisor set")
    n_pairs = len(A) * len(B)
    if op == "prod":
        iva, ivb = A.int_view, B.int_view
        can_np = (
            iva.arr is not None and ivb.arr is not None
            and _abs_bound(iva.ints) * _abs_bound(ivb.ints) < _INT64_SAFE
        )
    elif op == "ratio":
        can_np = False
    else:
        can_np = _common_scaled(A, B) is not None
    if can_np and n_pairs <= 40_000_000:
        vals, _ = _outer_values(A, B, op)
        return int(np.unique(vals).size)
    if n_pairs <= 500_000:
        return len({_pair_value(a, b, op) for a in A.elements for b in B.elements})
    return _distinct_count_fingerprint(A, B, op)


# ---------------------------------------------------------------------------
# Moment energies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyValue:
    """A moment energy: exact integer when the exponent is integral, plus a
    float image (nearest representable, inf on overflow)."""

    exact: int | None
    approx: float

    def __float__(self) -> float:
        return self.approx


def _to_float(x: int) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def energy(f: RepFn, k) -> EnergyValue:
    """k-th moment of the representation function: sum of counts(x)**k.

    Integer k: exact big-integer arithmetic.  Fractional k: float64 powers
    with pairwise summation (relative error well under the documented 1e-12
    at desk scale).  k = 1 recovers |A||B|; a ratio-op RepFn yields the
    multiplicative energies.
    """
    kr = as_rational(k) if not isinstance(k, float) else k
    if isinstance(kr, float):
        if kr < 0:
            raise DomainError("energy exponent must be >= 0")
        if kr.is_integer():
            kr = int(kr)
    elif kr < 0:
        raise DomainError("energy exponent must be >= 0")
    c = f.counts_array
    if isinstance(kr, int):
        uniq, mult = np.unique(c, return_counts=True)
        total = sum(int(m) * int(u) ** kr for u, m in zip(uniq.tolist(), mult.tolist()))
        return EnergyValue(total, _to_float(total))
    kf = float(kr)
    approx = float(np.sum(np.power(c.astype(np.float64), kf)))
    return EnergyValue(None, approx)


# ---------------------------------------------------------------------------
# Projection counts  #{(p1, p2, q) in P x P x Q : p1 - p2 = q}
# ---------------------------------------------------------------------------

def _scaled_int_lists(P: FiniteSet, Q: FiniteSet):
    """(P_ints, Q_ints) on a common positive scale, or None if non-integer mix fails."""
    ivp, ivq = P.int_view, Q.int_view
    s = ivp.scale * ivq.scale // math.gcd(ivp.scale, ivq.scale)
    mp_, mq = s // ivp.scale, s // ivq.scale
    p = ivp.ints if mp_ == 1 else [v * mp_ for v in ivp.ints]
    q = ivq.ints if mq == 1 else [v * mq for v in ivq.ints]
    return p, q


def _difference_counts_bigint(p_ints: list[int]) -> tuple[np.ndarray, int]:
    """Exact difference-count table of an integer set via one big multiply.

    Returns (counts, span) with counts[d + span] = #{(p1,p2): p1 - p2 = d}.
    Packs the 0/1 generating polynomial into an integer with 16- or 32-bit
    limbs (coefficients never exceed |P|, so no carry interference) and
    multiplies it against its reversal.
    """
    lo, hi = p_ints[0], p_ints[-1]
    span = hi - lo
    width = 2 if len(p_ints) < (1 << 16) else 4
    dtype = np.uint16 if width == 2 else np.uint32
    pos = np.array([v - lo for v in p_ints], dtype=np.int64)
    buf = np.zeros((span + 1) * width, dtype=np.uint8)
    buf[pos * width] = 1
    X = int.from_bytes(buf.tobytes(), "little")
    buf[:] = 0
    buf[(span - pos) * width] = 1
    Y = int.from_bytes(buf.tobytes(), "little")
    prod = int(_mpz(X) * _mpz(Y))
    nbytes = (2 * span + 2) * width
    raw = prod.to_bytes(nbytes + width, "little")
    counts = np.frombuffer(raw, dtype=dtype)[: 2 * span + 1].astype(np.int64)
    # every ordered pair lands in exactly one coefficient
    assert int(counts.sum()) == len(p_ints) ** 2
    return counts, span


def projection_count(P: FiniteSet, Q: FiniteSet, *, budget: int | None = None,
                     strategy: str = "auto") -> int:
    """Exact #{(p1, p2, q) in P x P x Q : p1 - p2 = q}.

    Equivalently the total count of P-differences landing in Q.  Strategy
    "hash" is the O(|P| * min(|P|, |Q|)) loop with hashed membership;
    "poly" is the big-integer correlation path (integer sets of moderate
    span).  "auto" picks the cheaper applicable one.  A `budget` caps the
    hash loop's pair operations; exceeding it raises BudgetExceededError.
    """
    np_, nq = len(P), len(Q)
    if np_ == 0 or nq == 0:
        return 0
    loop_cost = np_ * min(np_, nq)

    if strategy == "auto":
        strategy = "hash"
        if loop_cost > 200_000:
            ints = _scaled_int_lists(P, Q)
            if ints is not None:
                p_ints, _ = ints
                if p_ints[-1] - p_ints[0] <= _POLY_SPAN_LIMIT:
                    strategy = "poly"

    if strategy == "poly":
        p_ints, q_ints = _scaled_int_lists(P, Q)
        counts, span = _difference_counts_bigint(p_ints)
        total = 0
        for q in q_ints:
            if -span <= q <= span:
                total += int(counts[q + span])
        return total

    if strategy != "hash":
        raise DomainError(f"unknown projection_count strategy {strategy!r}")
    if budget is not None and loop_cost > budget:
        raise BudgetExceededError(
            f"projection_count needs {loop_cost} pair operations, budget {budget}"
        )
    if nq <= np_:
        members = P.members
        pe, qe = P.elements, Q.elements
        return sum(1 for p2 in pe for q in qe if p2 + q in members)
    members = Q.members
    pe = P.elements
    return sum(1 for p1 in pe for p2 in pe if p1 - p2 in members)


# ---------------------------------------------------------------------------
# RepFn CSV dump (debug/test format): header "value,count"
# ---------------------------------------------------------------------------

def dump_repfn_csv(f: RepFn, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["value", "count"])
        for v, c in f.items():
            w.writerow([str(v), c])


def load_repfn_csv(path) -> dict:
    """Read a RepFn dump back into a value -> count dict."""
    out: dict = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        header = next(r, None)
        if header != ["value", "count"]:
            raise DomainError(f"{path}: expected header 'value,count'")
        for row in r:
            if not row:
                continue
            out[as_rational(row[0])] = int(row[1])
    return out
