"""Exact incidence counting for Cartesian grids against lines and convex-curve translates.

Points are A x B for finite rational sets A, B.  Lines must have finite
nonzero slope (a zero-slope line meets a Cartesian grid in |A| points and
breaks the incidence regime being measured, so it is rejected).  Convex
curves are evaluated as lookup tables over integer arguments only: a
translate of the interpolant of a convex set touches the grid exactly where
table[x - h] - v lands in B, so no smooth interpolation is needed.

The point/line incidence bound itself carries an unknown absolute constant;
`st_ratio` therefore reports the measured ratio against
(|P| |L|)^(2/3) + |L| and is never asserted.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DivisionDomainError, DomainError
from .sets import FiniteSet, Rational, as_rational, is_convex

__all__ = [
    "Line",
    "CurveTranslate",
    "count_incidences_lines",
    "count_incidences_curve",
    "st_ratio",
    "integer_line_family",
    "read_lines_csv",
    "write_lines_csv",
]

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class Line:
    """y = slope * x + intercept with finite nonzero rational slope."""

    slope: Rational
    intercept: Rational

    def __post_init__(self):
        object.__setattr__(self, "slope", as_rational(self.slope))
        object.__setattr__(self, "intercept", as_rational(self.intercept))
        if self.slope == 0:
            raise DivisionDomainError("line slope must be nonzero")


@dataclass(frozen=True)
class CurveTranslate:
    """A translate y = table(x - h_shift) - v_shift of a convex lookup table.

    `base` holds the table values (index j -> base[j-1], 1-based arguments);
    arguments outside [1, len(base)] yield no incidence.
    """

    base: FiniteSet
    h_shift: int
    v_shift: Rational

    def __post_init__(self):
        object.__setattr__(self, "v_shift", as_rational(self.v_shift))
        if not is_convex(self.base):
            raise DomainError("curve table must come from a convex set")


def _int64_grid(A: FiniteSet, B: FiniteSet, lines) -> bool:
    iva, ivb = A.int_view, B.int_view
    if iva.scale != 1 or ivb.scale != 1 or iva.arr is None or ivb.arr is None:
        return False
    if not all(isinstance(l.slope, int) and isinstance(l.intercept, int) for l in lines):
        return False
    bound_a = max((abs(v) for v in (iva.ints[0], iva.ints[-1])), default=0) if iva.ints else 0
    worst = max(
        (abs(l.slope) * bound_a + abs(l.intercept) for l in lines), default=0
    )
    return worst < _INT64_SAFE


def count_incidences_lines(A: FiniteSet, B: FiniteSet, lines) -> int:
    """Exact #{(a, b, line) : a in A, b in B, b = slope*a + intercept}."""
    lines = list(lines)
    for l in lines:
        if l.slope == 0:
            raise DivisionDomainError("line slope must be nonzero")
    if not lines or len(A) == 0 or len(B) == 0:
        return 0
    if _int64_grid(A, B, lines):
        a = A.int_view.arr
        bs = np.sort(B.int_view.arr)
        slopes = np.array([l.slope for l in lines], dtype=np.int64)
        icpts = np.array([l.intercept for l in lines], dtype=np.int64)
        y = slopes[:, None] * a[None, :] + icpts[:, None]
        idx = np.searchsorted(bs, y)
        idx[idx == bs.size] = bs.size - 1
        return int(np.count_nonzero(bs[idx] == y))
    members = B.members
    total = 0
    for l in lines:
        m, c = l.slope, l.intercept
        total += sum(1 for a in A.elements if as_rational(m * a + c) in members)
    return total


def count_incidences_curve(x_range: int, B: FiniteSet, translates) -> int:
    """Exact solution count of table(x - h) - v = b over x in [1, x_range].

    Table lookups only: x - h outside the table's 1-based index range
    contributes nothing.
    """
    if x_range < 0:
        raise DomainError("x_range must be nonnegative")
    members = B.members
    total = 0
    for t in translates:
        table = t.base.elements
        lo = max(1, 1 + t.h_shift)
        hi = min(x_range, len(table) + t.h_shift)
        for x in range(lo, hi + 1):
            if as_rational(table[x - t.h_shift - 1] - t.v_shift) in members:
                total += 1
    return total


def st_ratio(incidences: int, points: int, lines: int) -> float:
    """Measured incidence ratio against (points*lines)^(2/3) + lines.

    A diagnostic for the hidden constant of the incidence bound; reported,
    never asserted.
    """
    if points < 1 or lines < 1:
        raise DomainError("st_ratio needs points >= 1 and lines >= 1")
    return incidences / ((points * lines) ** (2.0 / 3.0) + lines)


def integer_line_family(slope_count: int, intercept_count: int) -> list[Line]:
    """{y = m x + b : m in 1..slope_count, b in 1..intercept_count}."""
    return [
        Line(m, b)
        for m in range(1, slope_count + 1)
        for b in range(1, intercept_count + 1)
    ]


# ---------------------------------------------------------------------------
# Line family files: CSV rows "slope,intercept" with rational entries
# ---------------------------------------------------------------------------

def read_lines_csv(path) -> list[Line]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (row[0].strip().startswith("#")):
                continue
            if [c.strip().lower() for c in row[:2]] == ["slope", "intercept"]:
                continue  # optional header
            if len(row) < 2:
                raise DomainError(f"{path}:{lineno}: expected 'slope,intercept'")
            try:
                slope = as_rational(row[0])
                icpt = as_rational(row[1])
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise DomainError(f"{path}:{lineno}: bad rational in {row!r}") from exc
            if slope == 0:
                raise DivisionDomainError(f"{path}:{lineno}: zero slope rejected")
            out.append(Line(slope, icpt))
    return out


def write_lines_csv(lines, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["slope", "intercept"])
        for l in lines:
            w.writerow([str(l.slope), str(l.intercept)])
