"""Command-line surface: every library operation behind a stable,
scriptable text interface.

Output is deterministic — identical invocations produce byte-identical
output, with the effective settings echoed in "#" header comments.
Exit codes: 0 success, 2 usage or parse error, 3 horizon or certificate
error, 4 inconclusive verdict.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction
from typing import IO, Iterator

from .density import (
    DEFAULT_SCAN_CAP,
    SCAN_CAP_ENV,
    TrendPolicy,
    VerdictKind,
    decimal_str,
    exh_trajectory,
    frac_str,
    member_verdict,
    mu_trajectory,
    phi,
    trajectory_csv,
    upper_density,
    verdict_record,
)
from .errors import (
    EvaluationRangeError,
    FamilyRangeError,
    FormatError,
    HorizonError,
    PseudoUnionError,
    ScanCapError,
)
from .families import WindowFamily, family_from_spec, family_union
from .idealops import (
    i_converges,
    pseudo_union,
    separating_witness,
    sequence_from_spec,
)
from .partition import (
    Mode,
    block_norm_report,
    build_partition,
    partition_csv,
    verify_partition,
)
from .sets import (
    EMPTY,
    GeneratorSet,
    IntegerSet,
    IntervalSet,
    enumerate_up_to,
    explicit,
    format_iset,
    interval_union,
    parse_iset,
    support_size,
)

__all__ = ["main", "run"]

DEFAULT_SET_HORIZON = 1 << 20


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse wired to caller-supplied streams; never calls sys.exit."""

    out_stream: IO[str] = sys.stdout
    err_stream: IO[str] = sys.stderr

    def _print_message(self, message: str, file: IO[str] | None = None) -> None:
        if message:
            target = self.err_stream if file is sys.stderr else self.out_stream
            target.write(message)

    def exit(self, status: int = 0, message: str | None = None) -> None:  # type: ignore[override]
        if message:
            self.err_stream.write(message)
        raise _Exit(status)

    def error(self, message: str) -> None:  # type: ignore[override]
        self.err_stream.write(self.format_usage())
        self.err_stream.write(f"{self.prog}: error: {message}\n")
        raise _Exit(2)


# ---------------------------------------------------------------------------
# argument value parsers


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo_s, hi_s = text.split("..")
        lo, hi = int(lo_s), int(hi_s)
    except ValueError:
        raise FormatError(f"expected a range 'a..b', got {text!r}")
    if lo < 0 or hi < lo:
        raise FormatError(f"bad range {text!r}")
    return lo, hi


def _parse_int_list(text: str) -> list[int]:
    out: list[int] = []
    for tok in text.split(","):
        tok = tok.strip()
        if ".." in tok:
            lo, hi = _parse_range(tok)
            out.extend(range(lo, hi + 1))
        elif tok:
            out.append(int(tok))
    if not out:
        raise FormatError(f"empty integer list {text!r}")
    return out


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"not a rational: {text!r}")


def _parse_fraction_list(text: str) -> list[Fraction]:
    values = [_parse_fraction(tok) for tok in text.split(",") if tok.strip()]
    if not values:
        raise FormatError(f"empty rational list {text!r}")
    return values


def _squares(horizon: int) -> GeneratorSet:
    def gen() -> Iterator[int]:
        i = 0
        while True:
            yield i * i
            i += 1

    return GeneratorSet(
        lambda x: math.isqrt(x) ** 2 == x, horizon, gen, label="squares"
    )


def _icbrt(x: int) -> int:
    r = round(x ** (1.0 / 3.0)) if x > 0 else 0
    while (r + 1) ** 3 <= x:
        r += 1
    while r**3 > x:
        r -= 1
    return r


def _cubes(horizon: int) -> GeneratorSet:
    def gen() -> Iterator[int]:
        i = 0
        while True:
            yield i**3
            i += 1

    return GeneratorSet(lambda x: _icbrt(x) ** 3 == x, horizon, gen, label="cubes")


def _arithmetic(first: int, step: int, horizon: int) -> IntegerSet:
    if step < 1 or first < 0:
        raise FormatError(f"arith:a,d needs a >= 0 and d >= 1, got a={first}, d={step}")
    if step == 1:
        return IntervalSet(((first, None),))

    def gen() -> Iterator[int]:
        x = first
        while True:
            yield x
            x += step

    return GeneratorSet(
        lambda x: x >= first and (x - first) % step == 0,
        horizon,
        gen,
        label=f"arith:{first},{step}",
    )


def parse_set_spec(spec: str, family: WindowFamily, horizon: int | None) -> IntegerSet:
    """Set grammar: empty | list:a,b,c | intervals:a-b,c-d | blocks |
    squares | cubes | arith:a,d | file:<path>."""
    h = horizon if horizon is not None else DEFAULT_SET_HORIZON
    if spec == "empty":
        return EMPTY
    if spec == "blocks":
        return family_union(family, horizon=horizon)
    if spec == "squares":
        return _squares(h)
    if spec == "cubes":
        return _cubes(h)
    if spec.startswith("list:"):
        try:
            values = [int(tok) for tok in spec[len("list:"):].split(",") if tok.strip()]
        except ValueError:
            raise FormatError(f"bad integer in set spec {spec!r}")
        if any(v < 0 for v in values):
            raise FormatError(f"negative element in set spec {spec!r}")
        return explicit(values)
    if spec.startswith("intervals:"):
        pairs = []
        for tok in spec[len("intervals:"):].split(","):
            tok = tok.strip()
            if not tok:
                continue
            parts = tok.split("-")
            if len(parts) != 2:
                raise FormatError(f"bad interval token {tok!r} in {spec!r}")
            try:
                lo, hi = int(parts[0]), int(parts[1])
            except ValueError:
                raise FormatError(f"bad interval token {tok!r} in {spec!r}")
            if lo < 0 or hi < lo:
                raise FormatError(f"bad interval {tok!r} in {spec!r}")
            pairs.append((lo, hi))
        return interval_union(pairs)
    if spec.startswith("arith:"):
        parts = spec[len("arith:"):].split(",")
        if len(parts) != 2:
            raise FormatError(f"arith spec needs two values, got {spec!r}")
        try:
            first, step = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"bad integer in set spec {spec!r}")
        return _arithmetic(first, step, h)
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        with open(path, "r", encoding="utf-8") as fh:
            return parse_iset(fh.read(), path=path)
    raise FormatError(
        f"unknown set spec {spec!r} (expected empty|list:..|intervals:..|blocks|"
        f"squares|cubes|arith:a,d|file:<path>)"
    )


# ---------------------------------------------------------------------------
# command helpers


def _policy_from_args(args: argparse.Namespace) -> TrendPolicy:
    return TrendPolicy(
        k_from=args.k_from,
        k_to=args.k_to,
        rho=_parse_fraction(args.rho),
        delta=_parse_fraction(args.delta),
    )


def _add_family_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--family",
        default="classical",
        help="window family: classical | factorial | file:<path> (default classical)",
    )


def _add_set_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--set",
        required=True,
        dest="set_spec",
        help="integer set: empty|list:a,b,c|intervals:a-b,c-d|blocks|squares|cubes|"
        "arith:a,d|file:<path>",
    )
    p.add_argument(
        "--horizon",
        type=int,
        default=None,
        help=f"enumeration horizon for generator sets (default {DEFAULT_SET_HORIZON}; "
        "'blocks' defaults to its family's natural horizon)",
    )


def _add_policy_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k-from", type=int, default=4, help="first doubling-window exponent")
    p.add_argument("--k-to", type=int, default=16, help="last doubling-window exponent")
    p.add_argument("--rho", default="3/4", help="trend decay factor in (0,1)")
    p.add_argument("--delta", default="1/100", help="non-vanishing threshold in (0,1)")


def _header(sub: str, pairs: list[tuple[str, object]]) -> list[str]:
    return [f"windensity {sub}"] + [f"{k}={v}" for k, v in pairs]


def _emit(args: argparse.Namespace, text: str, stdout: IO[str]) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _effective_horizon(a: IntegerSet, flag: int | None) -> str:
    if isinstance(a, GeneratorSet):
        return str(a.horizon)
    return "unbounded" if flag is None else str(flag)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_mu(args, stdout):
    family = family_from_spec(args.family)
    a = parse_set_spec(args.set_spec, family, args.horizon)
    lo, hi = _parse_range(args.n)
    traj = mu_trajectory(family, a, lo, hi)
    comments = _header(
        "mu",
        [
            ("family", args.family),
            ("set", args.set_spec),
            ("n", args.n),
            ("horizon", _effective_horizon(a, args.horizon)),
        ],
    )
    _emit(args, trajectory_csv(traj, comments), stdout)
    return 0


def _cmd_phi(args, stdout):
    family = family_from_spec(args.family)
    a = parse_set_spec(args.set_spec, family, args.horizon)
    res = phi(family, a, horizon=args.scan_horizon, scan_cap=args.scan_cap)
    comments = _header(
        "phi",
        [
            ("family", args.family),
            ("set", args.set_spec),
            ("scan-horizon", args.scan_horizon if args.scan_horizon is not None else "exact"),
            ("scan-cap", args.scan_cap if args.scan_cap is not None else DEFAULT_SCAN_CAP),
        ],
    )
    lines = [f"# {c}" for c in comments] + [str(res)]
    _emit(args, "\n".join(lines) + "\n", stdout)
    return 0


def _cmd_norm(args, stdout):
    family = family_from_spec(args.family)
    a = parse_set_spec(args.set_spec, family, args.horizon)
    lo, hi = _parse_range(args.window)
    value = upper_density(family, a, lo, hi)
    comments = _header(
        "norm",
        [("family", args.family), ("set", args.set_spec), ("window", args.window)],
    )
    lines = [f"# {c}" for c in comments] + [f"{frac_str(value)} {decimal_str(value)}"]
    _emit(args, "\n".join(lines) + "\n", stdout)
    return 0


def _cmd_exh(args, stdout):
    family = family_from_spec(args.family)
    a = parse_set_spec(args.set_spec, family, args.horizon)
    cuts = sorted(set(_parse_int_list(args.m)))
    traj = exh_trajectory(family, a, cuts, horizon=args.scan_horizon, scan_cap=args.scan_cap)
    comments = _header(
        "exh",
        [
            ("family", args.family),
            ("set", args.set_spec),
            ("m", ",".join(str(m) for m in cuts)),
            ("scan-horizon", args.scan_horizon if args.scan_horizon is not None else "exact"),
            ("notes", ";".join(traj.notes)),
        ],
    )
    _emit(args, trajectory_csv(traj, comments), stdout)
    return 0


def _cmd_member(args, stdout):
    family = family_from_spec(args.family)
    a = parse_set_spec(args.set_spec, family, args.horizon)
    policy = _policy_from_args(args)
    verdict = member_verdict(family, a, policy)
    comments = _header(
        "member",
        [
            ("family", args.family),
            ("set", args.set_spec),
            ("k-from", policy.k_from),
            ("k-to", policy.k_to),
            ("rho", frac_str(policy.rho)),
            ("delta", frac_str(policy.delta)),
        ],
    )
    lines = [f"# {c}" for c in comments] + [verdict_record(verdict)]
    _emit(args, "\n".join(lines) + "\n", stdout)
    return 0 if verdict.kind is not VerdictKind.INCONCLUSIVE else 4


def _cmd_converge(args, stdout):
    family = family_from_spec(args.family)

    def resolver(spec: str) -> IntegerSet:
        return parse_set_spec(spec, family, args.horizon)

    seq = sequence_from_spec(args.seq, resolver)
    limit = _parse_fraction(args.limit)
    epsilons = _parse_fraction_list(args.eps)
    policy = _policy_from_args(args)
    report = i_converges(family, seq, limit, epsilons, policy)
    comments = _header(
        "converge",
        [
            ("family", args.family),
            ("seq", args.seq),
            ("limit", frac_str(limit)),
            ("eps", args.eps),
            ("k-from", policy.k_from),
            ("k-to", policy.k_to),
            ("rho", frac_str(policy.rho)),
            ("delta", frac_str(policy.delta)),
        ],
    )
    lines = [f"# {c}" for c in comments]
    for eps, verdict in report.items:
        lines.append(f"eps={frac_str(eps)} {verdict_record(verdict)}")
    bottleneck = frac_str(report.bottleneck) if report.bottleneck is not None else "-"
    lines.append(f"converges={'true' if report.converges else 'false'} bottleneck={bottleneck}")
    _emit(args, "\n".join(lines) + "\n", stdout)
    inconclusive = any(v.kind is VerdictKind.INCONCLUSIVE for _, v in report.items)
    return 4 if inconclusive else 0


def _cmd_pseudo_union(args, stdout):
    family = family_from_spec(args.family)
    specs = [tok for tok in args.members.split(";") if tok.strip()]
    if not specs:
        raise FormatError("no member specs given")
    members = [parse_set_spec(tok, family, args.horizon) for tok in specs]
    result = pseudo_union(
        family,
        members,
        m_grid=[0] + [1 << j for j in range(args.grid_max_exp + 1)],
        scan_horizon=args.scan_horizon,
        scan_cap=args.scan_cap,
    )
    comments = _header(
        "pseudo-union",
        [
            ("family", args.family),
            ("members", args.members),
            ("grid-max-exp", args.grid_max_exp),
            ("scan-horizon", args.scan_horizon if args.scan_horizon is not None else "auto"),
            ("preview-upto", args.preview_upto),
        ],
    )
    lines = [f"# {c}" for c in comments]
    for i, spec in enumerate(specs):
        res = result.phi_results[i]
        lines.append(
            f"member={i} spec={spec} threshold={result.thresholds[i]} "
            f"tol={frac_str(result.tolerances[i])} phi={str(res)}"
        )
    preview = enumerate_up_to(result.union_set, args.preview_upto)
    lines.append(
        f"union-preview[0..{args.preview_upto}]=" + ",".join(str(x) for x in preview)
    )
    _emit(args, "\n".join(lines) + "\n", stdout)
    return 0


def _cmd_witness(args, stdout):
    fam_a = family_from_spec(args.family_a)
    fam_b = family_from_spec(args.family_b)
    witness, report = separating_witness(
        fam_a, fam_b, block_index_max=args.block_n_max, prefix_index_max=args.prefix_n_max
    )
    comments = _header(
        args.subcommand,
        [
            ("family-a", args.family_a),
            ("family-b", args.family_b),
            ("block-n-max", args.block_n_max),
            ("prefix-n-max", args.prefix_n_max),
            ("witness", getattr(witness, "label", "set")),
        ],
    )
    lines = [f"# {c}" for c in comments]
    lines.append(f"# mu trajectory under {report.block_family_label}")
    lines.append("index,numerator,denominator,decimal")
    for idx, value in report.mu_under_blocks.samples:
        lines.append(f"{idx},{value.numerator},{value.denominator},{decimal_str(value)}")
    lines.append(f"# prefix densities under {report.prefix_family_label} at N = n-th factorial")
    lines.append("n,N,numerator,denominator,decimal")
    for n, big_n, value in report.prefix_densities:
        lines.append(f"{n},{big_n},{value.numerator},{value.denominator},{decimal_str(value)}")
    _emit(args, "\n".join(lines) + "\n", stdout)
    return 0


def _cmd_partition(args, stdout):
    family = family_from_spec(args.family)
    mode = Mode(args.mode)
    report = build_partition(family, args.n_max, args.k_max, args.partition_horizon, mode)
    base = [
        ("family", args.family),
        ("action", args.action),
        ("mode", mode.value),
        ("n-max", args.n_max),
        ("k-max", args.k_max),
        ("horizon", args.partition_horizon),
    ]
    if args.action == "norms":
        lo, hi = _parse_range(args.k_window)
        norms = block_norm_report(family, report, lo, hi)
        comments = _header("partition", base + [("k-window", args.k_window)])
        text = "".join(f"# {c}\n" for c in comments) + partition_csv(report, norms)
        _emit(args, text, stdout)
        return 0
    if args.action == "verify":
        check = verify_partition(report)
        comments = _header("partition", base)
        lines = [f"# {c}" for c in comments]
        lines.append(
            "pairwise_disjoint={} covers_horizon={} overlap_witness={} gap_witness={}".format(
                str(check.pairwise_disjoint).lower(),
                str(check.covers_horizon).lower(),
                check.overlap_witness if check.overlap_witness is not None else "-",
                check.gap_witness if check.gap_witness is not None else "-",
            )
        )
        _emit(args, "\n".join(lines) + "\n", stdout)
        return 0
    # build
    comments = _header("partition", base)
    lines = [f"# {c}" for c in comments]
    for n, block in enumerate(report.blocks):
        lines.append(f"block={n} size={support_size(block)}")
    lines.append(
        "pairwise_disjoint={} covers_horizon={} degenerate_levels={} clipped={}".format(
            str(report.pairwise_disjoint).lower(),
            str(report.covers_horizon).lower(),
            ",".join(str(n) for n in report.degenerate_levels) or "-",
            str(report.clipped).lower(),
        )
    )
    if args.dump_dir:
        os.makedirs(args.dump_dir, exist_ok=True)
        for n, block in enumerate(report.blocks):
            path = os.path.join(args.dump_dir, f"block_{n:03d}.iset")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(format_iset(block))
        lines.append(f"dumped={len(report.blocks)} files under {args.dump_dir}")
    _emit(args, "\n".join(lines) + "\n", stdout)
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def _build_parser(stdout: IO[str], stderr: IO[str]) -> _Parser:
    parser = _Parser(
        prog="windensity",
        description=(
            "Exact windowed densities over window families: membership in the "
            "vanishing-density ideal, the induced submeasure, convergence along "
            "the ideal, and dyadic block partitions."
        ),
        epilog=(
            f"Environment: {SCAN_CAP_ENV} overrides the default exact-scan cap "
            f"({DEFAULT_SCAN_CAP})."
        ),
    )
    parser.out_stream = stdout
    parser.err_stream = stderr
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def new(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.out_stream = stdout  # type: ignore[attr-defined]
        p.err_stream = stderr  # type: ignore[attr-defined]
        p.add_argument("--out", default=None, help="write output to this file instead of stdout")
        return p

    p = new("mu", "density trajectory mu_n(A) over an index range (CSV)")
    _add_family_flag(p)
    _add_set_flags(p)
    p.add_argument("--n", required=True, help="index range a..b (inclusive)")
    p.set_defaults(func=_cmd_mu)

    p = new("phi", "supremum of mu_n(A): exact for finite sets, else horizon-scanned")
    _add_family_flag(p)
    _add_set_flags(p)
    p.add_argument("--scan-horizon", type=int, default=None, help="scan indices 0..N instead of exact mode")
    p.add_argument("--scan-cap", type=int, default=None, help="exact-mode scan cap")
    p.set_defaults(func=_cmd_phi)

    p = new("norm", "windowed upper density: exact max of mu over an index window")
    _add_family_flag(p)
    _add_set_flags(p)
    p.add_argument("--window", required=True, help="index window a..b (inclusive)")
    p.set_defaults(func=_cmd_norm)

    p = new("exh", "phi of the tails A \\ [0,m] over sampled cuts m (CSV)")
    _add_family_flag(p)
    _add_set_flags(p)
    p.add_argument("--m", required=True, help="cut list: comma-separated ints and a..b ranges")
    p.add_argument("--scan-horizon", type=int, default=None)
    p.add_argument("--scan-cap", type=int, default=None)
    p.set_defaults(func=_cmd_exh)

    p = new("member", "membership verdict for the family's vanishing ideal")
    _add_family_flag(p)
    _add_set_flags(p)
    _add_policy_flags(p)
    p.set_defaults(func=_cmd_member)

    p = new("converge", "classify x_k -> L along the family's ideal, per epsilon")
    _add_family_flag(p)
    p.add_argument("--seq", required=True, help="reciprocal|const:<rat>|char:<set>|file:<path>")
    p.add_argument("--limit", default="0", help="target limit L (rational, default 0)")
    p.add_argument("--eps", default="1/2,1/10,1/100", help="comma-separated epsilons")
    p.add_argument("--horizon", type=int, default=None, help="horizon for char:<set> carriers")
    _add_policy_flags(p)
    p.set_defaults(func=_cmd_converge)

    p = new("pseudo-union", "one set almost-containing every member, leftovers finite")
    _add_family_flag(p)
    p.add_argument("--members", required=True, help="semicolon-separated set specs")
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--grid-max-exp", type=int, default=16, help="cut grid {0} ∪ {2^j : j <= this}")
    p.add_argument("--scan-horizon", type=int, default=None)
    p.add_argument("--scan-cap", type=int, default=None)
    p.add_argument("--preview-upto", type=int, default=64, help="print union elements up to here")
    p.set_defaults(func=_cmd_pseudo_union)

    for name, help_ in (
        ("witness", "the block-union set separating natural density from block density"),
        ("compare", "run the witness construction against two chosen families"),
    ):
        p = new(name, help_)
        p.add_argument("--family-a", default="classical", help="prefix-density side")
        p.add_argument("--family-b", default="factorial", help="block-density side")
        p.add_argument("--block-n-max", type=int, default=20)
        p.add_argument("--prefix-n-max", type=int, default=10)
        p.set_defaults(func=_cmd_witness)

    p = new("partition", "build/verify/norm the dyadic level partition")
    p.add_argument("action", choices=["build", "verify", "norms"])
    _add_family_flag(p)
    p.add_argument("--mode", default=Mode.DISJOINTIFIED.value,
                   choices=[m.value for m in Mode])
    p.add_argument("--n-max", type=int, required=True, help="last level index")
    p.add_argument("--k-max", type=int, required=True, help="last window index sliced")
    p.add_argument("--horizon", dest="partition_horizon", type=int, required=True,
                   help="blocks live on [0, horizon]")
    p.add_argument("--k-window", default="8..16", help="norm window a..b (norms action)")
    p.add_argument("--dump-dir", default=None, help="dump blocks as .iset files (build action)")
    p.set_defaults(func=_cmd_partition)

    return parser


def run(argv: list[str], stdout: IO[str] | None = None, stderr: IO[str] | None = None) -> int:
    """Execute one invocation; returns the exit code without exiting."""
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = _build_parser(out, err)
    try:
        args = parser.parse_args(argv)
        return args.func(args, out)
    except _Exit as e:
        return e.code
    except FormatError as e:
        err.write(f"windensity: error: {e}\n")
        return 2
    except (OSError, ValueError) as e:
        err.write(f"windensity: error: {e}\n")
        return 2
    except (HorizonError, ScanCapError, FamilyRangeError, EvaluationRangeError) as e:
        err.write(f"windensity: certificate/horizon error: {e}\n")
        return 3
    except PseudoUnionError as e:
        err.write(f"windensity: certificate/horizon error: {e}\n")
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))
