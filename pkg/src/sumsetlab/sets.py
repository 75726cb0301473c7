"""Exact finite subsets of the rationals, family generators, and transforms.

Every element is an arbitrary-precision rational (`fractions.Fraction`,
collapsed to a plain `int` when the denominator is 1).  Set membership,
ordering, pair-set sizes, and representation counts are exact combinatorial
quantities here, so floating point never participates in an equality or
ordering decision.  Floats are rejected outright at the boundary: a caller
holding measured data must convert to an explicit rational first.

The module also provides the set-family generators used by the scan
harness (arithmetic/geometric progressions, convex families, seeded random
subsets) and the element-per-line file format.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainError, InfeasibleSpecError, InvalidScaleError

__all__ = [
    "Rational",
    "as_rational",
    "FiniteSet",
    "make_set",
    "transform",
    "intersect_dilate",
    "is_convex",
    "FamilySpec",
    "gen_family",
    "read_set_file",
    "write_set_file",
    "parse_rational",
]

Rational = int | Fraction

# Beyond this magnitude an element no longer fits the int64 kernels and the
# pure-Python big-integer paths take over.
_INT64_SAFE = 1 << 62


def as_rational(x) -> Rational:
    """Normalize a value to canonical exact form (int, or Fraction in lowest terms).

    Floats are refused: silently accepting them would smuggle binary rounding
    into exact set membership.
    """
    if isinstance(x, bool):
        raise TypeError("bool is not a rational element")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return as_rational(Fraction(x.strip()))
    if isinstance(x, float):
        raise TypeError(
            "float elements are not exact; pass Fraction(...) or a 'p/q' string"
        )
    raise TypeError(f"cannot interpret {type(x).__name__} as an exact rational")


def parse_rational(text: str) -> Rational:
    """Parse 'p' or 'p/q' (base 10) into canonical exact form."""
    return as_rational(text)


class _IntView:
    """Scaled-integer image of a set: ints[i] = scale * elements[i].

    `scale` is the positive lcm of all denominators, so the ints carry the
    full additive structure of the set.  `arr` is an int64 numpy mirror when
    every scaled value fits, else None (big-integer fallbacks take over).
    """

    __slots__ = ("ints", "scale", "arr")

    def __init__(self, ints: list[int], scale: int):
        self.ints = ints
        self.scale = scale
        if ints and max(abs(ints[0]), abs(ints[-1])) < _INT64_SAFE:
            self.arr = np.array(ints, dtype=np.int64)
        else:
            self.arr = np.array([], dtype=np.int64) if not ints else None


class FiniteSet:
    """Canonical sorted, duplicate-free collection of exact rationals.

    Immutable after construction; safe to share between workers.  Membership
    is O(1) expected via an internal frozenset, ordering queries via the
    sorted element tuple.
    """

    __slots__ = ("elements", "_members", "_iv")

    def __init__(self, values: Iterable = ()):
        self.elements: tuple[Rational, ...] = tuple(
            sorted({as_rational(v) for v in values})
        )
        self._members = None
        self._iv = None

    @classmethod
    def _from_sorted(cls, elements: Sequence[Rational]) -> "FiniteSet":
        # Internal fast path: caller guarantees strictly increasing canonical values.
        obj = cls.__new__(cls)
        obj.elements = tuple(elements)
        obj._members = None
        obj._iv = None
        return obj

    # -- container protocol -------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Rational]:
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def __contains__(self, x) -> bool:
        return as_rational(x) in self.members

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteSet) and self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        if len(self) <= 8:
            body = ", ".join(str(x) for x in self.elements)
        else:
            head = ", ".join(str(x) for x in self.elements[:3])
            tail = ", ".join(str(x) for x in self.elements[-2:])
            body = f"{head}, ... {tail}"
        return f"FiniteSet({{{body}}}, n={len(self)})"

    # -- views ---------------------------------------------------------------

    @property
    def members(self) -> frozenset:
        if self._members is None:
            self._members = frozenset(self.elements)
        return self._members

    @property
    def int_view(self) -> _IntView:
        """Scaled-integer image (cached). See _IntView."""
        if self._iv is None:
            scale = 1
            for x in self.elements:
                if not isinstance(x, int):
                    scale = scale * x.denominator // math.gcd(scale, x.denominator)
            if scale == 1:
                ints = list(self.elements)
            else:
                ints = [
                    x * scale if isinstance(x, int)
                    else x.numerator * (scale // x.denominator)
                    for x in self.elements
                ]
            self._iv = _IntView(ints, scale)
        return self._iv

    def __getstate__(self):
        return self.elements

    def __setstate__(self, state):
        self.elements = state
        self._members = None
        self._iv = None

    def __reduce__(self):
        return (FiniteSet._from_sorted, (self.elements,))


def make_set(values: Iterable) -> FiniteSet:
    """Build a canonical FiniteSet: duplicates collapsed, order normalized."""
    return FiniteSet(values)


def transform(A: FiniteSet, scale, shift=0) -> FiniteSet:
    """Affine image {scale*a + shift : a in A}; a bijection on elements.

    scale must be nonzero, so |result| = |A| always.
    """
    scale = as_rational(scale)
    shift = as_rational(shift)
    if scale == 0:
        raise InvalidScaleError("transform scale must be nonzero")
    mapped = [as_rational(scale * a + shift) for a in A.elements]
    if scale < 0:
        mapped.reverse()
    return FiniteSet._from_sorted(mapped)


def intersect_dilate(A: FiniteSet, lam) -> FiniteSet:
    """A intersected with its dilate A/lam, i.e. {x in A : lam*x in A}."""
    lam = as_rational(lam)
    if lam == 0:
        raise InvalidScaleError("dilation parameter must be nonzero")
    if lam == 1:
        return A
    members = A.members
    return FiniteSet._from_sorted([x for x in A.elements if as_rational(lam * x) in members])


def is_convex(A: FiniteSet) -> bool:
    """True iff consecutive gaps strictly increase (vacuously for |A| <= 2)."""
    e = A.elements
    if len(e) <= 2:
        return True
    prev_gap = e[1] - e[0]
    for i in range(2, len(e)):
        gap = e[i] - e[i - 1]
        if gap <= prev_gap:
            return False
        prev_gap = gap
    return True


# ---------------------------------------------------------------------------
# Set families
# ---------------------------------------------------------------------------

_FAMILY_KINDS = ("AP", "GP", "ConvexPower", "ConvexCustom", "RandomSubset", "Perturbed")


@dataclass(frozen=True)
class FamilySpec:
    """Description of a generated set family.

    kind/args:
      AP(a, d)            arithmetic progression, d != 0
      GP(a, r)            geometric progression, a != 0, r not in {0, 1, -1}
      ConvexPower(k)      {j**k : j in 1..n}, integer k >= 2
      ConvexCustom(seed)  seeded strictly-increasing random gap sequence
      RandomSubset(N[, seed])  n distinct uniform draws from [1, N]
                          (rejection sampling without replacement)
      Perturbed(base[, seed])  base family plus a small positive rational
                          jitter below a quarter of the minimum gap

    The size n is carried alongside so a spec is a complete generation
    recipe; `with_n` rebinds it for sweeps.
    """

    kind: str
    args: tuple
    n: int

    def __post_init__(self):
        if self.kind not in _FAMILY_KINDS:
            raise DomainError(f"unknown family kind {self.kind!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError("family size n must be a positive integer")
        k, a = self.kind, self.args
        if k == "AP":
            if len(a) != 2 or a[1] == 0:
                raise DomainError("AP requires (start, step) with step != 0")
        elif k == "GP":
            if len(a) != 2 or a[0] == 0 or a[1] in (0, 1, -1):
                raise DomainError("GP requires (start != 0, ratio not in {0, 1, -1})")
        elif k == "ConvexPower":
            if len(a) != 1 or not isinstance(a[0], int) or a[0] < 2:
                raise DomainError("ConvexPower requires an integer exponent >= 2")
        elif k == "ConvexCustom":
            if len(a) != 1 or not isinstance(a[0], int):
                raise DomainError("ConvexCustom requires an integer gap seed")
        elif k == "RandomSubset":
            if len(a) not in (1, 2) or not all(isinstance(v, int) for v in a):
                raise DomainError("RandomSubset requires (range N[, seed])")
            if a[0] < 1:
                raise DomainError("RandomSubset range must be >= 1")
        elif k == "Perturbed":
            if len(a) not in (1, 2) or not isinstance(a[0], FamilySpec):
                raise DomainError("Perturbed requires (base FamilySpec[, seed])")

    # -- constructors --------------------------------------------------------

    @classmethod
    def ap(cls, a, d, n: int) -> "FamilySpec":
        return cls("AP", (as_rational(a), as_rational(d)), n)

    @classmethod
    def gp(cls, a, r, n: int) -> "FamilySpec":
        return cls("GP", (as_rational(a), as_rational(r)), n)

    @classmethod
    def convex_power(cls, k: int, n: int) -> "FamilySpec":
        return cls("ConvexPower", (k,), n)

    @classmethod
    def convex_custom(cls, seed: int, n: int) -> "FamilySpec":
        return cls("ConvexCustom", (seed,), n)

    @classmethod
    def random_subset(cls, N: int, n: int, seed: int = 0) -> "FamilySpec":
        return cls("RandomSubset", (N, seed), n)

    @classmethod
    def perturbed(cls, base: "FamilySpec", n: int, seed: int = 0) -> "FamilySpec":
        return cls("Perturbed", (base, seed), n)

    def with_n(self, n: int) -> "FamilySpec":
        return FamilySpec(self.kind, self.args, n)

    def label(self) -> str:
        """Canonical text form, without the size (scans carry n separately)."""
        if self.kind == "Perturbed":
            inner = self.args[0].label()
            rest = "".join(f",{v}" for v in self.args[1:])
            return f"Perturbed({inner}{rest})"
        return f"{self.kind}({','.join(str(v) for v in self.args)})"

    @classmethod
    def parse(cls, text: str, n: int = 1) -> "FamilySpec":
        """Parse the label grammar, e.g. 'AP(1,1)' or 'Perturbed(GP(1,2),7)'."""
        text = text.strip()
        m = re.fullmatch(r"([A-Za-z]+)\((.*)\)", text)
        if not m:
            raise DomainError(f"cannot parse family spec {text!r}")
        kind = m.group(1)
        body = m.group(2)
        parts: list[str] = []
        depth = 0
        cur = ""
        for ch in body:
            if ch == "," and depth == 0:
                parts.append(cur)
                cur = ""
                continue
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            cur += ch
        if cur.strip() or not parts:
            parts.append(cur)
        parts = [p.strip() for p in parts if p.strip()]

        def int_arg(p: str) -> int:
            v = as_rational(p)
            if not isinstance(v, int):
                raise DomainError(f"integer argument expected, got {p!r}")
            return v

        if kind in ("AP", "GP"):
            if len(parts) != 2:
                raise DomainError(f"{kind} takes two arguments")
            return cls(kind, (as_rational(parts[0]), as_rational(parts[1])), n)
        if kind == "ConvexPower":
            return cls(kind, (int_arg(parts[0]),), n)
        if kind == "ConvexCustom":
            return cls(kind, (int_arg(parts[0]),), n)
        if kind == "RandomSubset":
            return cls(kind, tuple(int_arg(p) for p in parts), n)
        if kind == "Perturbed":
            base = cls.parse(parts[0], n)
            rest = tuple(int_arg(p) for p in parts[1:])
            return cls(kind, (base,) + rest, n)
        raise DomainError(f"unknown family kind {kind!r}")


def gen_family(spec: FamilySpec, n: int | None = None) -> FiniteSet:
    """Generate the set described by `spec` (size override via `n`).

    Deterministic: identical spec (including any seed) gives an identical
    set.  RandomSubset uses rejection sampling without replacement, which is
    part of the external contract for reproducibility.
    """
    if n is None:
        n = spec.n
    elif n != spec.n:
        spec = spec.with_n(n)
    k, a = spec.kind, spec.args

    if k == "AP":
        start, step = a
        return make_set([start + j * step for j in range(n)])
    if k == "GP":
        start, ratio = a
        vals = []
        cur = start
        for _ in range(n):
            vals.append(cur)
            cur = cur * ratio
        return make_set(vals)
    if k == "ConvexPower":
        (exp,) = a
        return FiniteSet._from_sorted([j ** exp for j in range(1, n + 1)])
    if k == "ConvexCustom":
        (seed,) = a
        rng = random.Random(seed)
        gap = rng.randint(1, 3)
        vals = [1]
        for _ in range(n - 1):
            vals.append(vals[-1] + gap)
            gap += rng.randint(1, 4)  # keeps the gap sequence strictly increasing
        return FiniteSet._from_sorted(vals)
    if k == "RandomSubset":
        N = a[0]
        seed = a[1] if len(a) > 1 else 0
        if N < n:
            raise InfeasibleSpecError(
                f"cannot draw {n} distinct values from [1, {N}]"
            )
        rng = random.Random(seed)
        seen: set[int] = set()
        while len(seen) < n:
            seen.add(rng.randint(1, N))
        return make_set(seen)
    if k == "Perturbed":
        base = a[0]
        seed = a[1] if len(a) > 1 else 0
        base_set = gen_family(base, n)
        rng = random.Random(seed)
        elems = base_set.elements
        if len(elems) >= 2:
            min_gap = min(elems[i + 1] - elems[i] for i in range(len(elems) - 1))
        else:
            min_gap = 1
        # jitter in [0, min_gap/4): order and cardinality are preserved exactly
        denom = 1 << 20
        out = [
            as_rational(x + Fraction(rng.randrange(denom), 4 * denom) * min_gap)
            for x in elems
        ]
        return FiniteSet._from_sorted(out)
    raise DomainError(f"unknown family kind {k!r}")


# ---------------------------------------------------------------------------
# Set literal files: one element per line, 'p' or 'p/q', '#' comments
# ---------------------------------------------------------------------------

def read_set_file(path) -> FiniteSet:
    vals = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                vals.append(as_rational(line))
            except (ValueError, ZeroDivisionError, TypeError) as exc:
                raise DomainError(f"{path}:{lineno}: bad rational {line!r}") from exc
    return make_set(vals)


def write_set_file(A: FiniteSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for x in A.elements:
            fh.write(f"{x}\n")
