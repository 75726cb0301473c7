"""Registry of named inequality checks, the scan harness, and extremal search.

Two species of check:

  * assert-type: an inequality that holds exactly for every finite set, with
    the constant extracted from the proof chain it implements.  Pure-integer
    statements are compared in exact arithmetic; whenever a fractional-power
    energy appears on either side, the comparison allows a 1e-9 relative
    slack (no inequality in the suite is tighter than that away from
    degenerate inputs, and the degenerate ones evaluate exactly).

  * ratio-report: an asymptotic claim whose constant is unknown.  The check
    computes lhs/rhs as a measurement and can never fail.

Checks are addressed by stable string ids (the external interface of the
scan CSV and the CLI).  A parametrized id may carry its parameters inline,
e.g. "holder_s[s=12/5]".
"""

from __future__ import annotations

import hashlib
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    BudgetExceededError,
    DivisionDomainError,
    DomainError,
    UnknownCheckError,
)
from .sets import FamilySpec, FiniteSet, as_rational, gen_family, intersect_dilate, is_convex
from .energy import energy, pair_set_size, projection_count, rep_fn
from .constructions import (
    TWELVE_SEVENTHS,
    dominant_dyadic_class,
    popular_difference_mass,
    popular_sums,
    refine_rich_core,
    rich_difference_elements,
    rich_sum_elements,
)
from .incidence import count_incidences_lines, integer_line_family, st_ratio

__all__ = [
    "CheckResult",
    "ScanRow",
    "SearchResult",
    "DEFAULT_VERIFY_CHECKS",
    "check_ids",
    "run_check",
    "run_check_suite",
    "run_scan",
    "search_extremal",
    "scan_rows_to_csv",
    "scan_rows_to_json",
    "SetCore",
]

REL_SLACK = 1e-9

# Theorem exponents under ratio scan:  4/3 + 10/4407,  46/29,  8/5 + 1/3440.
EXP_SP = 4.0 / 3.0 + 10.0 / 4407.0
EXP_CSUM = 46.0 / 29.0
EXP_CDIFF = 8.0 / 5.0 + 1.0 / 3440.0

# Default cap on pair operations inside hashed projection counts.
DEFAULT_PAIR_BUDGET = 8_000_000


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one inequality/ratio evaluation."""

    check_id: str
    inputs_desc: str
    lhs: float
    rhs: float
    ratio: float
    verdict: str  # "pass" | "fail" | "ratio-report" | "skipped(<reason>)"

    @property
    def failed(self) -> bool:
        return self.verdict == "fail"

    @property
    def skipped(self) -> bool:
        return self.verdict.startswith("skipped")


@dataclass(frozen=True)
class ScanRow:
    family: str
    n: int
    check_id: str
    lhs: float
    rhs: float
    ratio: float
    verdict: str
    elapsed: float


class _Skip(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _to_float(x) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def _safe_ratio(lhs: float, rhs: float) -> float:
    if rhs == 0:
        return math.inf if lhs > 0 else 0.0
    if math.isinf(lhs) or math.isinf(rhs):
        return math.nan if math.isinf(lhs) and math.isinf(rhs) else (0.0 if math.isinf(rhs) else math.inf)
    return lhs / rhs


# ---------------------------------------------------------------------------
# Cached per-set quantities
# ---------------------------------------------------------------------------

class SetCore:
    """Lazily cached single-set quantities shared by all checks on one set."""

    def __init__(self, A: FiniteSet, budget: int | None = DEFAULT_PAIR_BUDGET):
        self.A = A
        self.budget = budget
        self._c: dict = {}

    def _memo(self, key, fn):
        if key not in self._c:
            self._c[key] = fn()
        return self._c[key]

    def rep(self, op: str):
        return self._memo(("rep", op), lambda: rep_fn(self.A, self.A, op))

    def E(self, k, op: str = "diff"):
        key = ("E", op, str(k))
        return self._memo(key, lambda: energy(self.rep(op), k))

    def pair_size(self, op: str) -> int:
        return self._memo(("psize", op), lambda: pair_set_size(self.A, self.A, op))

    def popular_diff(self) -> FiniteSet:
        return self._memo("P+mass", lambda: popular_difference_mass(self.A))[0]

    def popular_diff_mass(self) -> int:
        return self._memo("P+mass", lambda: popular_difference_mass(self.A))[1]

    def rich_diff(self) -> FiniteSet:
        return self._memo(
            "R", lambda: rich_difference_elements(self.A, self.popular_diff())
        )

    def proj_popular_diff(self) -> int:
        def calc():
            P = self.popular_diff()
            return projection_count(P, P, budget=self.budget)

        return self._memo("projPP", calc)

    def refinement(self):
        return self._memo("refine", lambda: refine_rich_core(self.A))


class EvalContext:
    """One check evaluation: a SetCore for A plus an optional second set B."""

    def __init__(self, core: SetCore, B: FiniteSet | None, params: dict):
        self.core = core
        self.A = core.A
        self.B = B if B is not None else core.A
        self.same = self.B is core.A or self.B == core.A
        self.params = params
        self._c: dict = {}

    def rep_ab(self, op: str):
        if self.same:
            return self.core.rep(op)
        key = ("rep", op)
        if key not in self._c:
            self._c[key] = rep_fn(self.A, self.B, op)
        return self._c[key]

    def E_ab(self, k, op: str = "diff"):
        if self.same:
            return self.core.E(k, op)
        key = ("E", op, str(k))
        if key not in self._c:
            self._c[key] = energy(self.rep_ab(op), k)
        return self._c[key]

    def pair_size_ab(self, op: str) -> int:
        if self.same:
            return self.core.pair_size(op)
        key = ("psize", op)
        if key not in self._c:
            self._c[key] = pair_set_size(self.A, self.B, op)
        return self._c[key]

    def desc(self, extra: str = "") -> str:
        d = f"|A|={len(self.A)}"
        if not self.same:
            d += f",|B|={len(self.B)}"
        if extra:
            d += "," + extra
        return d

    def const_scale(self) -> Fraction:
        # harness self-test hook: scales the lhs before comparison
        return Fraction(as_rational(self.params.get("const_scale", 1)))


def _verdict_exact(lhs, rhs, scale: Fraction) -> str:
    return "pass" if Fraction(lhs) * scale <= Fraction(rhs) else "fail"


def _verdict_float(lhs: float, rhs: float, scale: Fraction) -> str:
    slack = REL_SLACK * max(abs(lhs), abs(rhs), 1.0)
    return "pass" if lhs * float(scale) <= rhs + slack else "fail"


def _res(check_id, desc, lhs, rhs, verdict) -> CheckResult:
    lf, rf = _to_float(lhs), _to_float(rhs)
    return CheckResult(check_id, desc, lf, rf, _safe_ratio(lf, rf), verdict)


# ---------------------------------------------------------------------------
# Assert-type checks
# ---------------------------------------------------------------------------

def _chk_cs_energy(ctx: EvalContext, cid: str) -> CheckResult:
    op = ctx.params.get("op", "diff")
    if op not in ("sum", "diff"):
        raise DomainError("cs_energy op must be 'sum' or 'diff'")
    e2 = ctx.E_ab(2).exact  # sum of squared counts; equal for sum and diff
    lhs = (len(ctx.A) * len(ctx.B)) ** 2
    rhs = ctx.pair_size_ab(op) * e2
    return _res(cid, ctx.desc(f"op={op}"), lhs, rhs,
                _verdict_exact(lhs, rhs, ctx.const_scale()))


def _chk_cs_proj(ctx: EvalContext, cid: str) -> CheckResult:
    # collision bound for the map (a, b) -> a op b on the domain A x B
    op = ctx.params.get("op", "sum")
    r = ctx.rep_ab(op)
    collisions = energy(r, 2).exact
    lhs = (len(ctx.A) * len(ctx.B)) ** 2
    rhs = r.size * collisions
    return _res(cid, ctx.desc(f"op={op}"), lhs, rhs,
                _verdict_exact(lhs, rhs, ctx.const_scale()))


def _chk_popular_mass(ctx: EvalContext, cid: str) -> CheckResult:
    n = len(ctx.A)
    mass = ctx.core.popular_diff_mass()
    lhs = Fraction(10, 11) * n * n
    return _res(cid, ctx.desc(), lhs, mass,
                _verdict_exact(lhs, mass, ctx.const_scale()))


def _chk_rich_size(ctx: EvalContext, cid: str) -> CheckResult:
    # strict half bound: |R| > |A|/2, i.e. |R| >= floor(|A|/2) + 1 over ints
    n = len(ctx.A)
    rich = len(ctx.core.rich_diff())
    lhs = n // 2 + 1
    return _res(cid, ctx.desc(), lhs, rich,
                _verdict_exact(lhs, rich, ctx.const_scale()))


def _chk_diff_proj(ctx: EvalContext, cid: str) -> CheckResult:
    n = len(ctx.A)
    e3 = ctx.core.E(3).exact
    proj = ctx.core.proj_popular_diff()
    lhs = Fraction(9, 484) * n ** 6
    rhs = e3 * proj
    return _res(cid, ctx.desc(), lhs, rhs,
                _verdict_exact(lhs, rhs, ctx.const_scale()))


def _chk_sum_proj(ctx: EvalContext, cid: str) -> CheckResult:
    if len(ctx.A) < 3:
        raise _Skip("guard:too-small")
    core_set, trace = ctx.core.refinement()
    if trace.stop_reason != "energy-criterion-met":
        raise _Skip(f"guard:{trace.stop_reason}")
    ambient = len(ctx.A)
    pop = popular_sums(core_set, ambient)
    rich = rich_sum_elements(core_set, pop)
    dclass = dominant_dyadic_class(rep_fn(rich, rich, "diff"), TWELVE_SEVENTHS)
    proj = projection_count(pop, dclass.members, budget=ctx.core.budget)
    e3 = energy(rep_fn(core_set, core_set, "diff"), 3).exact
    prod = dclass.level * len(dclass.members) * len(core_set)
    lhs_sq = Fraction(prod, 2) ** 2
    rhs = e3 * proj
    return _res(
        cid,
        ctx.desc(f"|B|={len(core_set)},level={dclass.level},class={len(dclass.members)}"),
        lhs_sq, rhs, _verdict_exact(lhs_sq, rhs, ctx.const_scale()),
    )


def _chk_e127_trivial(ctx: EvalContext, cid: str) -> CheckResult:
    n = len(ctx.A)
    if n == 0:
        raise _Skip("guard:empty")
    e = ctx.core.E(TWELVE_SEVENTHS).approx
    lo_violation = (n * n) / e if e > 0 else math.inf
    hi_violation = e / float(n) ** 3
    lhs = max(lo_violation, hi_violation)
    scale = ctx.const_scale()
    verdict = _verdict_float(lhs, 1.0, scale)
    return _res(cid, ctx.desc(f"E12/7={e:.6g}"), lhs, 1.0, verdict)


def _chk_holder_s(ctx: EvalContext, cid: str) -> CheckResult:
    s = Fraction(as_rational(ctx.params.get("s", Fraction(3, 2))))
    if not (1 < s < 3):
        raise DomainError("holder_s requires s strictly between 1 and 3")
    es = ctx.E_ab(s).approx
    e3 = ctx.E_ab(3).approx
    mass = len(ctx.A) * len(ctx.B)
    exp1 = float((s - 1) / 2)
    exp2 = float((3 - s) / 2)
    rhs = e3 ** exp1 * float(mass) ** exp2
    return _res(cid, ctx.desc(f"s={s}"), es, rhs,
                _verdict_float(es, rhs, ctx.const_scale()))


def _chk_e2_interp(ctx: EvalContext, cid: str) -> CheckResult:
    e2 = float(ctx.core.E(2).approx)
    rhs = ctx.core.E(TWELVE_SEVENTHS).approx ** (7.0 / 9.0) * ctx.core.E(3).approx ** (2.0 / 9.0)
    return _res(cid, ctx.desc(), e2, rhs, _verdict_float(e2, rhs, ctx.const_scale()))


def _chk_e32_interp(ctx: EvalContext, cid: str) -> CheckResult:
    n = len(ctx.A)
    lhs = ctx.core.E(Fraction(3, 2)).approx ** (2.0 / 3.0)
    rhs = float(n) ** 0.4 * ctx.core.E(TWELVE_SEVENTHS).approx ** (7.0 / 15.0)
    return _res(cid, ctx.desc(), lhs, rhs, _verdict_float(lhs, rhs, ctx.const_scale()))


def _chk_e2_lower(ctx: EvalContext, cid: str) -> CheckResult:
    n = len(ctx.A)
    lhs = n ** 4
    rhs = ctx.core.pair_size("sum") * ctx.core.E(2).exact
    return _res(cid, ctx.desc(), lhs, rhs, _verdict_exact(lhs, rhs, ctx.const_scale()))


# ---------------------------------------------------------------------------
# Ratio-report checks
# ---------------------------------------------------------------------------

def _chk_convex_e3(ctx: EvalContext, cid: str) -> CheckResult:
    lhs = float(ctx.E_ab(3).approx)
    rhs = float(len(ctx.A)) * float(len(ctx.B)) ** 2
    return _res(cid, ctx.desc(), lhs, rhs, "ratio-report")


def _chk_convex_es(ctx: EvalContext, cid: str) -> CheckResult:
    s = Fraction(as_rational(ctx.params.get("s", Fraction(3, 2))))
    if not (1 < s < 3):
        raise DomainError("convex_es requires s strictly between 1 and 3")
    lhs = ctx.E_ab(s).approx
    rhs = float(len(ctx.A)) * float(len(ctx.B)) ** float((s + 1) / 2)
    return _res(cid, ctx.desc(f"s={s}"), lhs, rhs, "ratio-report")


def _chk_prop_ea(ctx: EvalContext, cid: str) -> CheckResult:
    n = len(ctx.A)
    lhs = ctx.core.E(Fraction(12, 5)).approx
    rhs = float(n) ** (38.0 / 15.0) * float(ctx.core.pair_size("diff")) ** (4.0 / 45.0)
    return _res(cid, ctx.desc(), lhs, rhs, "ratio-report")


def _chk_rs_prop(ctx: EvalContext, cid: str) -> CheckResult:
    n = len(ctx.A)
    guard = int(ctx.params.get("size_guard", 200))
    if n > guard:
        raise _Skip("budget")
    if 0 in ctx.A.members:
        raise _Skip("zero-in-set")
    r = ctx.core.rep("ratio")
    cls = dominant_dyadic_class(r, 2)
    lam_values = cls.members
    sizes = sorted(
        (pair_set_size(ctx.A, intersect_dilate(ctx.A, lam), "prod") for lam in lam_values),
        reverse=True,
    )
    lhs = float(sizes[0])
    s_sz = len(lam_values)
    q_idx = max(0, math.ceil(s_sz / 64) - 1)
    quantile = sizes[q_idx]
    log_rhs = (
        18 * math.log(n)
        - 0.5 * math.log(s_sz)
        - 4 * math.log(ctx.core.pair_size("prod"))
        - 8 * math.log(ctx.core.pair_size("sum"))
    )
    rhs = math.exp(log_rhs) if log_rhs < 700 else math.inf
    ratio = math.exp(math.log(lhs) - log_rhs)
    q_ratio = math.exp(math.log(quantile) - log_rhs)
    return CheckResult(
        cid,
        ctx.desc(f"|S|={s_sz},q64={quantile},q64_ratio={q_ratio:.4g}"),
        lhs, rhs, ratio, "ratio-report",
    )


def _chk_lemma6_e3(ctx: EvalContext, cid: str) -> CheckResult:
    n = len(ctx.A)
    e3 = ctx.E_ab(3).approx
    log_rhs = (
        2 * math.log(len(ctx.B))
        + 17.5 * math.log(ctx.core.pair_size("prod"))
        + 24 * math.log(ctx.core.pair_size("sum"))
        - 54 * math.log(n)
    )
    rhs = math.exp(log_rhs) if log_rhs < 700 else math.inf
    ratio = math.exp(math.log(e3) - log_rhs) if e3 > 0 else 0.0
    return CheckResult(cid, ctx.desc(), e3, rhs, ratio, "ratio-report")


def _chk_thm_sp(ctx: EvalContext, cid: str) -> CheckResult:
    n = len(ctx.A)
    big = max(ctx.core.pair_size("sum"), ctx.core.pair_size("prod"))
    rhs = float(n) ** EXP_SP
    return _res(cid, ctx.desc(), big, rhs, "ratio-report")


def _chk_thm_csum(ctx: EvalContext, cid: str) -> CheckResult:
    n = len(ctx.A)
    rhs = float(n) ** EXP_CSUM
    return _res(cid, ctx.desc(), ctx.core.pair_size("sum"), rhs, "ratio-report")


def _chk_thm_cdiff(ctx: EvalContext, cid: str) -> CheckResult:
    n = len(ctx.A)
    rhs = float(n) ** EXP_CDIFF
    return _res(cid, ctx.desc(), ctx.core.pair_size("diff"), rhs, "ratio-report")


def _chk_st_measure(ctx: EvalContext, cid: str) -> CheckResult:
    n = len(ctx.A)
    if n == 0:
        raise _Skip("guard:empty")
    slopes = int(ctx.params.get("slopes", math.isqrt(n - 1) + 1))
    intercepts = int(ctx.params.get("intercepts", n))
    fam = integer_line_family(slopes, intercepts)
    count = count_incidences_lines(ctx.A, ctx.A, fam)
    points = n * n
    ratio = st_ratio(count, points, len(fam))
    denom = (points * len(fam)) ** (2.0 / 3.0) + len(fam)
    return CheckResult(
        cid, ctx.desc(f"|L|={len(fam)},I={count}"), float(count), denom, ratio,
        "ratio-report",
    )


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckDef:
    fn: object
    kind: str  # "assert" | "ratio"
    needs_convex: bool = False
    derived_b: bool = False  # scan harness supplies a seeded random B
    doc: str = ""


REGISTRY: dict[str, CheckDef] = {
    "cs_energy": CheckDef(_chk_cs_energy, "assert",
                          doc="(|A||B|)^2 <= |A op B| * E(A,B), op in {sum,diff}"),
    "cs_proj": CheckDef(_chk_cs_proj, "assert",
                        doc="collision bound |X|^2 <= |Y| * #{f(x1)=f(x2)} for f = pair op"),
    "popular_mass": CheckDef(_chk_popular_mass, "assert",
                             doc="popular differences carry >= 10/11 of the |A|^2 mass"),
    "rich_size": CheckDef(_chk_rich_size, "assert",
                          doc="rich-difference subset exceeds half of A"),
    "diff_proj": CheckDef(_chk_diff_proj, "assert",
                          doc="(9/484)|A|^6 <= E_3(A) * proj(P, P)"),
    "sum_proj": CheckDef(_chk_sum_proj, "assert",
                         doc="(level*class*|B|/2)^2 <= E_3(B) * proj(popular sums, class)"),
    "e127_trivial": CheckDef(_chk_e127_trivial, "assert",
                             doc="|Z|^2 <= E_{12/7}(Z) <= |Z|^3"),
    "holder_s": CheckDef(_chk_holder_s, "assert",
                         doc="E_s <= E_3^{(s-1)/2} (|A||B|)^{(3-s)/2}, 1 < s < 3"),
    "e2_interp": CheckDef(_chk_e2_interp, "assert",
                          doc="E <= E_{12/7}^{7/9} E_3^{2/9}"),
    "e32_interp": CheckDef(_chk_e32_interp, "assert",
                           doc="E_{3/2}^{2/3} <= |B|^{2/5} E_{12/7}^{7/15}"),
    "e2_lower": CheckDef(_chk_e2_lower, "assert",
                         doc="E(B) >= |B|^4 / |B+B|"),
    "convex_e3": CheckDef(_chk_convex_e3, "ratio", needs_convex=True, derived_b=True,
                          doc="E_3(A,B) vs |A||B|^2 for convex A"),
    "convex_es": CheckDef(_chk_convex_es, "ratio", needs_convex=True, derived_b=True,
                          doc="E_s(A,B) vs |A||B|^{(s+1)/2} for convex A"),
    "prop_ea": CheckDef(_chk_prop_ea, "ratio", needs_convex=True,
                        doc="E_{12/5}(A) vs |A|^{38/15} |A-A|^{4/45} for convex A"),
    "rs_prop": CheckDef(_chk_rs_prop, "ratio",
                        doc="max |A * (A cap A/lam)| over the dominant ratio class vs "
                            "|A|^18 / (|S|^{1/2} |AA|^4 |A+A|^8)"),
    "lemma6_e3": CheckDef(_chk_lemma6_e3, "ratio", derived_b=True,
                          doc="E_3(A,B) vs |B|^2 |AA|^{35/2} |A+A|^{24} / |A|^54"),
    "thm_sp": CheckDef(_chk_thm_sp, "ratio",
                       doc="max(|A+A|,|AA|) vs |A|^{4/3 + 10/4407}"),
    "thm_csum": CheckDef(_chk_thm_csum, "ratio", needs_convex=True,
                         doc="|A+A| vs |A|^{46/29} for convex A"),
    "thm_cdiff": CheckDef(_chk_thm_cdiff, "ratio", needs_convex=True,
                          doc="|A-A| vs |A|^{8/5 + 1/3440} for convex A"),
    "st_measure": CheckDef(_chk_st_measure, "ratio",
                           doc="incidences of A x A with an integer line family vs "
                               "(|P||L|)^{2/3} + |L|"),
}

# The default assert suite run by `verify` (ratio reports are opt-in).
DEFAULT_VERIFY_CHECKS: tuple[str, ...] = (
    "cs_energy",
    "cs_proj",
    "popular_mass",
    "rich_size",
    "diff_proj",
    "e127_trivial",
    "holder_s[s=3/2]",
    "holder_s[s=12/7]",
    "holder_s[s=12/5]",
    "e2_interp",
    "e32_interp",
    "e2_lower",
)


def check_ids() -> list[str]:
    return sorted(REGISTRY)


def parse_check_id(check_id: str) -> tuple[str, dict]:
    """Split 'holder_s[s=12/5]' into ('holder_s', {'s': '12/5'})."""
    base, sep, rest = check_id.partition("[")
    base = base.strip()
    if base not in REGISTRY:
        raise UnknownCheckError(f"unknown check id {base!r}")
    params: dict = {}
    if sep:
        if not rest.endswith("]"):
            raise UnknownCheckError(f"malformed check id {check_id!r}")
        for piece in rest[:-1].split(","):
            if not piece.strip():
                continue
            k, eq, v = piece.partition("=")
            if not eq:
                raise UnknownCheckError(f"malformed check parameter {piece!r}")
            params[k.strip()] = v.strip()
    return base, params


def run_check(
    check_id: str,
    A: FiniteSet,
    B: FiniteSet | None = None,
    params: dict | None = None,
    *,
    core: SetCore | None = None,
) -> CheckResult:
    """Evaluate one registered check on A (and B where the check uses a pair).

    Budget and guard trips surface as skipped verdicts, never exceptions;
    only an unknown id or malformed parameters raise.
    """
    base, inline = parse_check_id(check_id)
    merged = dict(inline)
    if params:
        merged.update(params)
    cdef = REGISTRY[base]
    if core is None:
        budget = int(merged.get("budget", DEFAULT_PAIR_BUDGET))
        core = SetCore(A, budget=budget)
    elif "budget" in merged:
        core.budget = int(merged["budget"])
    if cdef.needs_convex and not is_convex(A):
        return CheckResult(check_id, f"|A|={len(A)}", math.nan, math.nan, math.nan,
                           "skipped(not-convex)")
    ctx = EvalContext(core, B, merged)
    try:
        return cdef.fn(ctx, check_id)
    except _Skip as sk:
        return CheckResult(check_id, ctx.desc(), math.nan, math.nan, math.nan,
                           f"skipped({sk.reason})")
    except BudgetExceededError:
        return CheckResult(check_id, ctx.desc(), math.nan, math.nan, math.nan,
                           "skipped(budget)")
    except DivisionDomainError:
        return CheckResult(check_id, ctx.desc(), math.nan, math.nan, math.nan,
                           "skipped(zero-in-set)")


def run_check_suite(
    A: FiniteSet,
    checks=DEFAULT_VERIFY_CHECKS,
    B: FiniteSet | None = None,
    params: dict | None = None,
    budget: int | None = DEFAULT_PAIR_BUDGET,
) -> list[CheckResult]:
    """Run several checks on one set, sharing all cached quantities."""
    core = SetCore(A, budget=budget)
    return [run_check(cid, A, B, params, core=core) for cid in checks]


# ---------------------------------------------------------------------------
# Scan harness
# ---------------------------------------------------------------------------

def _derived_b(seed: int, label: str, n: int, check_id: str) -> FiniteSet:
    """Deterministic equal-size companion set for two-set ratio checks."""
    digest = hashlib.sha256(f"{seed}|{label}|{n}|{check_id}|B".encode()).digest()
    sub_seed = int.from_bytes(digest[:8], "big")
    return gen_family(FamilySpec.random_subset(4 * n * n, n, seed=sub_seed))


def _eval_cell_group(args) -> list[ScanRow]:
    spec, n, checks, seed, budget = args
    label = spec.label()
    rows = []
    try:
        A = gen_family(spec, n)
    except Exception as exc:  # infeasible spec, etc: isolate, never abort
        reason = type(exc).__name__
        return [
            ScanRow(label, n, cid, math.nan, math.nan, math.nan,
                    f"skipped(gen-error:{reason})", 0.0)
            for cid in checks
        ]
    core = SetCore(A, budget=budget)
    for cid in checks:
        t0 = time.perf_counter()
        base, _ = parse_check_id(cid)
        B = None
        if REGISTRY[base].derived_b:
            B = _derived_b(seed, label, n, cid)
        try:
            res = run_check(cid, A, B, core=core)
        except Exception as exc:  # defensive: a bug in one cell must not kill a scan
            res = CheckResult(cid, f"|A|={len(A)}", math.nan, math.nan, math.nan,
                              f"skipped(error:{type(exc).__name__})")
        rows.append(ScanRow(label, n, cid, res.lhs, res.rhs, res.ratio, res.verdict,
                            time.perf_counter() - t0))
    return rows


def run_scan(
    families,
    sizes,
    checks,
    seed: int = 0,
    *,
    jobs: int = 1,
    budget: int | None = DEFAULT_PAIR_BUDGET,
) -> list[ScanRow]:
    """Evaluate every (family, size, check) cell.

    Rows come back in lexicographic (family label, n, check id) order no
    matter how many workers ran; per-cell errors downgrade to skipped rows.
    """
    checks = list(checks)
    for cid in checks:
        parse_check_id(cid)  # validates
    tasks = [
        (spec, n, checks, seed, budget)
        for spec in families
        for n in sizes
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            groups = list(pool.map(_eval_cell_group, tasks))
    else:
        groups = [_eval_cell_group(t) for t in tasks]
    rows = [row for grp in groups for row in grp]
    rows.sort(key=lambda r: (r.family, r.n, r.check_id))
    return rows


def _fmt_cell(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(x)


def scan_rows_to_csv(rows) -> str:
    """Canonical scan artifact. elapsed_s is fixed at 0 in serialized output
    so that identical configurations produce byte-identical files regardless
    of wall-clock jitter or worker count; live timings stay on the row
    objects."""
    out = ["family,n,check_id,lhs,rhs,ratio,verdict,elapsed_s"]
    for r in rows:
        out.append(
            f"{r.family},{r.n},{r.check_id},{_fmt_cell(r.lhs)},{_fmt_cell(r.rhs)},"
            f"{_fmt_cell(r.ratio)},{r.verdict},0.000000"
        )
    return "\n".join(out) + "\n"


def scan_rows_to_json(rows) -> str:
    import json

    def clean(x: float):
        return x if math.isfinite(x) else str(x)

    payload = [
        {
            "family": r.family,
            "n": r.n,
            "check_id": r.check_id,
            "lhs": clean(r.lhs),
            "rhs": clean(r.rhs),
            "ratio": clean(r.ratio),
            "verdict": r.verdict,
            "elapsed_s": 0.0,
        }
        for r in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Extremal search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchResult:
    best: FiniteSet
    ratio: float
    trajectory: tuple[float, ...]


_OBJECTIVE_EXPONENTS = {
    "thm_sp": EXP_SP,
    "thm_csum": EXP_CSUM,
    "thm_cdiff": EXP_CDIFF,
}


def _objective_ratio(objective: str, arr: np.ndarray) -> float:
    n = arr.size
    if objective == "thm_sp":
        s = np.unique(arr[:, None] + arr[None, :]).size
        p = np.unique(arr[:, None] * arr[None, :]).size
        return max(s, p) / float(n) ** EXP_SP
    if objective == "thm_csum":
        s = np.unique(arr[:, None] + arr[None, :]).size
        return s / float(n) ** EXP_CSUM
    s = np.unique(arr[:, None] - arr[None, :]).size
    return s / float(n) ** EXP_CDIFF


def search_extremal(objective: str, n: int, budget: int, seed: int = 0) -> SearchResult:
    """Hill-climb toward sets minimizing a theorem ratio.

    States are n distinct integers in [1, 4n^2]; moves replace one element;
    stagnation triggers a seeded restart.  `budget` counts objective
    evaluations, so budget=1 returns the start configuration (an arithmetic
    progression, which every run therefore weakly improves on).
    """
    if objective not in _OBJECTIVE_EXPONENTS:
        raise DomainError(f"objective must be one of {sorted(_OBJECTIVE_EXPONENTS)}")
    if n < 4:
        raise DomainError("search requires n >= 4")
    if budget < 1:
        raise DomainError("budget must be >= 1")
    hi = 4 * n * n
    rng = random.Random(seed)

    cur = list(range(1, n + 1))
    cur_set = set(cur)
    cur_ratio = _objective_ratio(objective, np.array(cur, dtype=np.int64))
    evals = 1
    best = sorted(cur)
    best_ratio = cur_ratio
    traj = [best_ratio]
    stagnation = 0
    stall_limit = max(50, 2 * n)

    while evals < budget:
        if stagnation >= stall_limit:
            cur = sorted(rng.sample(range(1, hi + 1), n))
            cur_set = set(cur)
            cur_ratio = _objective_ratio(objective, np.array(cur, dtype=np.int64))
            evals += 1
            stagnation = 0
        else:
            i = rng.randrange(n)
            while True:
                v = rng.randint(1, hi)
                if v not in cur_set:
                    break
            cand = cur.copy()
            old = cand[i]
            cand[i] = v
            cand_ratio = _objective_ratio(objective, np.array(cand, dtype=np.int64))
            evals += 1
            if cand_ratio < cur_ratio:
                cur = cand
                cur_set.discard(old)
                cur_set.add(v)
                cur_ratio = cand_ratio
                stagnation = 0
            else:
                stagnation += 1
        if cur_ratio < best_ratio:
            best_ratio = cur_ratio
            best = sorted(cur)
        traj.append(best_ratio)
    return SearchResult(FiniteSet(best), best_ratio, tuple(traj))
