"""Command-line front end.

Subcommands: gen, stats, verify, scan, incidence, search.  Exit codes:
0 ok, 1 at least one assert-type check failed, 2 usage error, 3 I/O error.
Config precedence is CLI flags > JSON config file > built-in defaults, and
every command is deterministic given its full configuration (the default
seed is 0 so bare invocations reproduce).  Output files are written
atomically (temp file + rename), so an interrupted scan never leaves a
truncated artifact.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from fractions import Fraction

from .errors import SumsetLabError, UnknownCheckError
from .sets import (
    FamilySpec,
    FiniteSet,
    gen_family,
    is_convex,
    read_set_file,
)
from .energy import energy, pair_set_size, rep_fn
from .constructions import popular_difference_mass, rich_difference_elements
from .incidence import count_incidences_lines, integer_line_family, read_lines_csv, st_ratio
from .verifier import (
    DEFAULT_VERIFY_CHECKS,
    run_check_suite,
    run_scan,
    scan_rows_to_csv,
    scan_rows_to_json,
    search_extremal,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".sumsetlab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    return cfg


def _opt(args, cfg: dict, key: str, default):
    """CLI flag > config file > default."""
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in cfg:
        return cfg[key]
    return default


def _resolve_set(args, cfg) -> FiniteSet:
    infile = _opt(args, cfg, "infile", None)
    family = _opt(args, cfg, "family", None)
    if (infile is None) == (family is None):
        raise UsageError("supply exactly one set source: --family or --in")
    if infile is not None:
        return read_set_file(infile)
    n = _opt(args, cfg, "n", None)
    if n is None:
        raise UsageError("--family needs --n")
    spec = FamilySpec.parse(family, int(n))
    spec = _reseed(spec, int(_opt(args, cfg, "seed", 0)))
    return gen_family(spec)


def _reseed(spec: FamilySpec, seed: int) -> FamilySpec:
    """Fill the seed slot of seedable family kinds when none was given."""
    if spec.kind == "RandomSubset" and len(spec.args) == 1:
        return FamilySpec(spec.kind, (spec.args[0], seed), spec.n)
    if spec.kind == "Perturbed" and len(spec.args) == 1:
        return FamilySpec(spec.kind, (spec.args[0], seed), spec.n)
    return spec


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_gen(args, cfg) -> int:
    family = _opt(args, cfg, "family", None)
    n = _opt(args, cfg, "n", None)
    if family is None or n is None:
        raise UsageError("gen requires --family and --n")
    spec = _reseed(FamilySpec.parse(family, int(n)), int(_opt(args, cfg, "seed", 0)))
    A = gen_family(spec)
    lines = "".join(f"{x}\n" for x in A.elements)
    _emit(lines, _opt(args, cfg, "out", None))
    return EXIT_OK


_STAT_ENERGY_KS = (Fraction(3, 2), Fraction(12, 7), 2, Fraction(12, 5), 3)


def _compute_stats(A: FiniteSet) -> dict:
    d = rep_fn(A, A, "diff")
    stats: dict = {
        "n": len(A),
        "sumset": pair_set_size(A, A, "sum"),
        "diffset": pair_set_size(A, A, "diff"),
        "is_convex": is_convex(A),
    }
    if 0 in A.members:
        stats["prodset"] = "n/a(0 in A)"
        stats["ratioset"] = "n/a(0 in A)"
        stats["E2_mult"] = "n/a(0 in A)"
    else:
        stats["prodset"] = pair_set_size(A, A, "prod")
        stats["ratioset"] = pair_set_size(A, A, "ratio")
        stats["E2_mult"] = energy(rep_fn(A, A, "ratio"), 2).exact
    for k in _STAT_ENERGY_KS:
        ev = energy(d, k)
        stats[f"E{k}"] = ev.exact if ev.exact is not None else ev.approx
    P, mass = popular_difference_mass(A)
    stats["popular_diffs"] = len(P)
    stats["popular_mass"] = mass
    stats["rich_elements"] = len(rich_difference_elements(A, P))
    return stats


def _cmd_stats(args, cfg) -> int:
    A = _resolve_set(args, cfg)
    stats = _compute_stats(A)
    fmt = _opt(args, cfg, "format", "text")
    if fmt == "json":
        text = json.dumps(stats, indent=2, default=str) + "\n"
    else:
        width = max(len(k) for k in stats)
        text = "".join(f"{k:<{width}}  {v}\n" for k, v in stats.items())
    _emit(text, _opt(args, cfg, "out", None))
    return EXIT_OK


def _results_table(results, fmt: str) -> str:
    if fmt == "json":
        payload = [
            {
                "check_id": r.check_id,
                "inputs_desc": r.inputs_desc,
                "lhs": r.lhs if math.isfinite(r.lhs) else str(r.lhs),
                "rhs": r.rhs if math.isfinite(r.rhs) else str(r.rhs),
                "ratio": r.ratio if math.isfinite(r.ratio) else str(r.ratio),
                "verdict": r.verdict,
            }
            for r in results
        ]
        return json.dumps(payload, indent=2) + "\n"
    lines = ["check_id,inputs_desc,lhs,rhs,ratio,verdict"]
    for r in results:
        lines.append(
            f"{r.check_id},\"{r.inputs_desc}\",{r.lhs!r},{r.rhs!r},{r.ratio!r},{r.verdict}"
        )
    return "\n".join(lines) + "\n"


def _cmd_verify(args, cfg) -> int:
    A = _resolve_set(args, cfg)
    checks = _opt(args, cfg, "checks", None)
    if checks is None:
        check_list = list(DEFAULT_VERIFY_CHECKS)
    else:
        check_list = [c.strip() for c in str(checks).split(",") if c.strip()]
    params = None
    raw_params = _opt(args, cfg, "check_params", None)
    if raw_params:
        params = json.loads(raw_params) if isinstance(raw_params, str) else raw_params
    budget = _opt(args, cfg, "budget", None)
    kwargs = {} if budget is None else {"budget": int(budget)}
    results = run_check_suite(A, check_list, params=params, **kwargs)
    for r in results:
        sys.stderr.write(f"{r.check_id}: {r.verdict}\n")
    text = _results_table(results, _opt(args, cfg, "format", "csv"))
    _emit(text, _opt(args, cfg, "out", None))
    return EXIT_CHECK_FAILED if any(r.verdict == "fail" for r in results) else EXIT_OK


def _cmd_scan(args, cfg) -> int:
    families_raw = _opt(args, cfg, "families", None)
    sizes_raw = _opt(args, cfg, "sizes", None)
    checks_raw = _opt(args, cfg, "checks", None)
    if not families_raw or not sizes_raw or not checks_raw:
        raise UsageError("scan requires --families, --sizes, and --checks")
    if isinstance(families_raw, str):
        families_raw = _split_top_level(families_raw)
    seed = int(_opt(args, cfg, "seed", 0))
    families = [_reseed(FamilySpec.parse(f, 1), seed) for f in families_raw]
    if isinstance(sizes_raw, str):
        sizes = [int(s) for s in sizes_raw.split(",") if s.strip()]
    else:
        sizes = [int(s) for s in sizes_raw]
    if isinstance(checks_raw, str):
        checks = [c.strip() for c in checks_raw.split(",") if c.strip()]
    else:
        checks = list(checks_raw)
    jobs = int(_opt(args, cfg, "jobs", 1))
    budget = _opt(args, cfg, "budget", None)
    kwargs = {} if budget is None else {"budget": int(budget)}
    rows = run_scan(families, sizes, checks, seed=seed, jobs=jobs, **kwargs)
    fmt = _opt(args, cfg, "format", "csv")
    text = scan_rows_to_json(rows) if fmt == "json" else scan_rows_to_csv(rows)
    _emit(text, _opt(args, cfg, "out", None))
    n_fail = sum(1 for r in rows if r.verdict == "fail")
    if n_fail:
        sys.stderr.write(f"{n_fail} failing cells\n")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _split_top_level(text: str) -> list[str]:
    """Split a comma list while respecting parentheses: 'AP(1,1),GP(1,2)'."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        cur += ch
    if cur.strip():
        parts.append(cur)
    return [p.strip() for p in parts if p.strip()]


def _cmd_incidence(args, cfg) -> int:
    grid = _opt(args, cfg, "grid", None)
    lines_file = _opt(args, cfg, "lines", None)
    if grid is not None:
        n = int(grid)
        A = FiniteSet(range(1, n + 1))
        B = A
        if lines_file:
            lines = read_lines_csv(lines_file)
        else:
            slopes = int(_opt(args, cfg, "slopes", math.isqrt(max(n - 1, 0)) + 1))
            lines = integer_line_family(slopes, n)
    else:
        xset = _opt(args, cfg, "xset", None)
        yset = _opt(args, cfg, "yset", None)
        if not xset or not lines_file:
            raise UsageError("incidence requires --grid N or (--xset FILE --lines FILE)")
        A = read_set_file(xset)
        B = read_set_file(yset) if yset else A
        lines = read_lines_csv(lines_file)
    count = count_incidences_lines(A, B, lines)
    points = len(A) * len(B)
    report = {
        "incidences": count,
        "points": points,
        "lines": len(lines),
        "st_ratio": st_ratio(count, points, len(lines)) if points and lines else 0.0,
    }
    fmt = _opt(args, cfg, "format", "text")
    if fmt == "json":
        text = json.dumps(report, indent=2) + "\n"
    else:
        text = "".join(f"{k}  {v}\n" for k, v in report.items())
    _emit(text, _opt(args, cfg, "out", None))
    return EXIT_OK


def _cmd_search(args, cfg) -> int:
    objective = _opt(args, cfg, "objective", None)
    n = _opt(args, cfg, "n", None)
    if objective is None or n is None:
        raise UsageError("search requires --objective and --n")
    budget = int(_opt(args, cfg, "budget", 1000))
    seed = int(_opt(args, cfg, "seed", 0))
    result = search_extremal(str(objective), int(n), budget, seed)
    out = _opt(args, cfg, "out", None)
    body = "".join(f"{x}\n" for x in result.best.elements)
    _emit(body, out)
    traj_path = _opt(args, cfg, "trajectory", None)
    if traj_path:
        rows = ["eval,best_ratio"]
        rows += [f"{i},{r!r}" for i, r in enumerate(result.trajectory)]
        _atomic_write(traj_path, "\n".join(rows) + "\n")
    sys.stderr.write(f"best ratio {result.ratio!r} after {len(result.trajectory)} evals\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sumsetlab",
        description="Exact sumset statistics, inequality verification, and ratio scans.",
    )
    p.add_argument("--config", help="JSON config file; flags override its keys")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, *, seed=True, out=True, fmt=None):
        if seed:
            sp.add_argument("--seed", type=int, default=None,
                            help="RNG seed (default 0; all commands are deterministic)")
        if out:
            sp.add_argument("--out", default=None, help="output path (default stdout)")
        if fmt:
            sp.add_argument("--format", choices=fmt, default=None)

    sp = sub.add_parser("gen", help="generate a set family and print/write it")
    sp.add_argument("--family", default=None, help="e.g. 'AP(1,1)', 'RandomSubset(1000)'")
    sp.add_argument("--n", type=int, default=None)
    add_common(sp)

    sp = sub.add_parser("stats", help="sizes, energies, popular/rich statistics")
    sp.add_argument("--family", default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--in", dest="infile", default=None, help="set file (one element per line)")
    add_common(sp, fmt=("text", "json"))

    sp = sub.add_parser("verify", help="run assert-type checks; exit 1 on any failure")
    sp.add_argument("--family", default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--in", dest="infile", default=None)
    sp.add_argument("--checks", default=None,
                    help="comma list of check ids (default: the assert suite)")
    sp.add_argument("--check-params", dest="check_params", default=None,
                    help="JSON object of parameter overrides, e.g. '{\"const_scale\": 2}'")
    sp.add_argument("--budget", type=int, default=None,
                    help="pair-operation budget for quadratic-cost counts")
    add_common(sp, fmt=("csv", "json"))

    sp = sub.add_parser("scan", help="sweep families x sizes x checks into CSV/JSON")
    sp.add_argument("--families", default=None, help="comma list, e.g. 'AP(1,1),GP(1,2)'")
    sp.add_argument("--sizes", default=None, help="comma list, e.g. '16,32,64'")
    sp.add_argument("--checks", default=None)
    sp.add_argument("--jobs", type=int, default=None, help="worker processes (default 1)")
    sp.add_argument("--budget", type=int, default=None)
    add_common(sp, fmt=("csv", "json"))

    sp = sub.add_parser("incidence", help="count point-line incidences on a grid")
    sp.add_argument("--grid", type=int, default=None, help="use the grid [1..N] x [1..N]")
    sp.add_argument("--slopes", type=int, default=None,
                    help="integer slopes 1..K for the default family (default ceil(sqrt(N)))")
    sp.add_argument("--xset", default=None, help="x-coordinate set file")
    sp.add_argument("--yset", default=None, help="y-coordinate set file (default: --xset)")
    sp.add_argument("--lines", default=None, help="CSV line family 'slope,intercept'")
    add_common(sp, seed=False, fmt=("text", "json"))

    sp = sub.add_parser("search", help="hill-climb for small theorem ratios")
    sp.add_argument("--objective", choices=("thm_sp", "thm_csum", "thm_cdiff"), default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--trajectory", default=None, help="write best-ratio trajectory CSV here")
    add_common(sp)

    return p


_COMMANDS = {
    "gen": _cmd_gen,
    "stats": _cmd_stats,
    "verify": _cmd_verify,
    "scan": _cmd_scan,
    "incidence": _cmd_incidence,
    "search": _cmd_search,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg_all = _load_config(args.config)
        cfg = cfg_all.get(args.command, cfg_all)  # flat or per-command sections
        return _COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except UnknownCheckError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SumsetLabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return EXIT_IO
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"usage error: bad JSON ({exc})\n")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
