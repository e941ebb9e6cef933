"""Windowed densities and the induced submeasure, in exact rational
arithmetic.

For a window family F = (F_n) and a set A:

* ``mu(family, n, A)`` is the normalized window count |A ∩ F_n| / |F_n|,
  a finitely additive probability measure for each fixed n;
* ``phi`` is the supremum of mu over all window indices — a monotone,
  subadditive set function with phi(∅) = 0. For finite-support sets the
  family's size certificate turns the supremum into a finite exact scan;
  otherwise a scan horizon must be supplied and the result is labeled a
  lower bound;
* ``upper_density`` is the exact maximum of mu over a declared finite
  index window, the library's honest surrogate for a limsup;
* ``exh_trajectory`` samples phi over shrinking tails A ∖ [0, m]; the
  vanishing of that trajectory is membership in the vanishing-density
  ideal;
* ``member_verdict`` diagnoses that membership with explicit
  certificates, trend estimates over doubling windows, or an
  Inconclusive outcome — never an unsupported limit claim.

Everything is computed in reduced ``fractions.Fraction`` values; decimal
rendering is presentation-layer only.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import FamilyRangeError, HorizonError, ScanCapError
from .families import WindowFamily
from .sets import (
    IntegerSet,
    IntervalSet,
    intersect_card,
    is_finite,
    max_element,
    support_size,
    tail,
)

__all__ = [
    "DEFAULT_SCAN_CAP",
    "PhiResult",
    "SCAN_CAP_ENV",
    "Trajectory",
    "TrendPolicy",
    "Verdict",
    "VerdictKind",
    "decimal_str",
    "exh_trajectory",
    "frac_str",
    "member_verdict",
    "mu",
    "mu_trajectory",
    "phi",
    "trajectory_csv",
    "upper_density",
    "verdict_record",
]

DEFAULT_SCAN_CAP = 200_000
SCAN_CAP_ENV = "WINDENSITY_SCAN_CAP"


def _scan_cap(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SCAN_CAP_ENV)
    return int(env) if env else DEFAULT_SCAN_CAP


def frac_str(value: Fraction) -> str:
    """Render with an explicit denominator ("1/1", "3/560")."""
    return f"{value.numerator}/{value.denominator}"


def decimal_str(value: Fraction, sig: int = 6) -> str:
    """Exact ``sig``-significant-digit decimal rendering (half-even ties).

    Deterministic and float-free; used only at the presentation layer.
    """
    if value == 0:
        return "0"
    n, d = value.numerator, value.denominator
    sign = "-" if n < 0 else ""
    n = abs(n)

    def at_least_pow10(k: int) -> bool:
        return n >= d * 10**k if k >= 0 else n * 10**-k >= d

    e = len(str(n)) - len(str(d))
    if at_least_pow10(e + 1):
        e += 1
    elif not at_least_pow10(e):
        e -= 1
    shift = sig - 1 - e
    num = n * 10**shift if shift >= 0 else n
    den = d if shift >= 0 else d * 10**-shift
    q, r = divmod(num, den)
    if 2 * r > den or (2 * r == den and q % 2 == 1):
        q += 1
    if q == 10**sig:
        q //= 10
        e += 1
    digits = str(q)
    if -4 <= e < sig:
        if e >= 0:
            whole, frac = digits[: e + 1], digits[e + 1 :].rstrip("0")
            return sign + whole + ("." + frac if frac else "")
        body = ("0" * (-e - 1) + digits).rstrip("0")
        return f"{sign}0.{body}"
    mantissa = (digits[0] + "." + digits[1:].rstrip("0")).rstrip(".")
    return f"{sign}{mantissa}e{e:+03d}"


# ---------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class Trajectory:
    """Sampled exact values of an index-parametrized density quantity.

    ``kind`` is "mu" (values mu_n(A) against the window index) or "exh"
    (values phi(A ∖ [0, m]) against the cut point m). Indices are strictly
    increasing and every value lies in [0, 1].
    """

    kind: str
    samples: tuple[tuple[int, Fraction], ...]
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("mu", "exh"):
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        prev = -1
        for idx, value in self.samples:
            if idx <= prev:
                raise ValueError("trajectory indices must be strictly increasing")
            if not 0 <= value <= 1:
                raise ValueError(f"trajectory value {value} outside [0, 1]")
            prev = idx

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(v for _, v in self.samples)


def trajectory_csv(traj: Trajectory, comments: Sequence[str] = ()) -> str:
    """Stable CSV: optional "#" comment lines, then
    index,numerator,denominator,decimal rows."""
    lines = [f"# {c}" for c in comments]
    lines.append("index,numerator,denominator,decimal")
    for idx, value in traj.samples:
        lines.append(f"{idx},{value.numerator},{value.denominator},{decimal_str(value)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# mu and windowed maxima


def mu(family: WindowFamily, n: int, a: IntegerSet) -> Fraction:
    """|A ∩ F_n| / |F_n| as a reduced fraction in [0, 1]."""
    w = family.window(n)
    return Fraction(intersect_card(a, w), w.size)


def mu_trajectory(family: WindowFamily, a: IntegerSet, n_from: int, n_to: int) -> Trajectory:
    """mu sampled on the inclusive index range [n_from, n_to]."""
    if n_from < 0 or n_to < n_from:
        raise ValueError(f"bad index range [{n_from}, {n_to}]")
    samples = tuple((n, mu(family, n, a)) for n in range(n_from, n_to + 1))
    return Trajectory("mu", samples)


def _max_mu(family: WindowFamily, a: IntegerSet, n_from: int, n_to: int) -> tuple[int, int, int]:
    """(numerator, denominator, argmax index) of max mu over [n_from, n_to].

    Integer cross-multiplication only; Fractions are built by callers.
    """
    best_num, best_den, best_at = 0, 1, n_from
    for n in range(n_from, n_to + 1):
        w = family.window(n)
        c = intersect_card(a, w)
        if c * best_den > best_num * w.size:
            best_num, best_den, best_at = c, w.size, n
            if best_num == best_den:
                break  # mu is capped at 1; nothing can beat it
    return best_num, best_den, best_at


def upper_density(family: WindowFamily, a: IntegerSet, n_from: int, n_to: int) -> Fraction:
    """Exact max of mu over the inclusive index window [n_from, n_to]."""
    if n_from < 0 or n_to < n_from:
        raise ValueError(f"empty or invalid index window [{n_from}, {n_to}]")
    num, den, _ = _max_mu(family, a, n_from, n_to)
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# phi


@dataclass(frozen=True)
class PhiResult:
    """Value of phi plus the evidence grade of the computation.

    ``exact`` means the value is the true supremum over every window
    index (finite-support certificate, or the value reached the global
    bound 1). Otherwise the value is a lower bound established by
    scanning indices up to ``scanned_to``.
    """

    value: Fraction
    exact: bool
    attained_at: int | None
    scanned_to: int
    note: str

    def __str__(self) -> str:
        grade = "Exact" if self.exact else f"LowerBoundAtHorizon({self.scanned_to})"
        return f"{frac_str(self.value)} {grade}"


def phi(
    family: WindowFamily,
    a: IntegerSet,
    horizon: int | None = None,
    scan_cap: int | None = None,
) -> PhiResult:
    """sup_n mu_n(A), exactly where a certificate exists.

    Exact mode (``horizon=None``) needs a known-finite set: indices are
    scanned upward and the scan stops at the first n* where
    |A| / size_lower_bound(n*) drops below the best value seen, which
    certifies that no later window can contribute more. Infinite or
    generator-backed sets need an explicit scan ``horizon``; the result
    is then flagged as a lower bound, except that a value of 1 is always
    exact (mu never exceeds 1).

    Raises :class:`ScanCapError` when exact mode runs out of scan budget
    before the certificate fires (e.g. a nonempty set that misses every
    window, so the best value stays 0).
    """
    cap = _scan_cap(scan_cap)
    if family.n_max is not None:
        # bounded (file-backed) family: its whole declared index range is
        # scannable, but the answer is inherently truncated evidence
        top = family.n_max if horizon is None else min(horizon, family.n_max)
        num, den, at = _max_mu(family, a, 0, top)
        value = Fraction(num, den)
        if value == 1:
            return PhiResult(value, True, at, top, "attains the global bound 1")
        return PhiResult(value, False, at, top, f"family truncated at index {family.n_max}")
    if horizon is None:
        if not is_finite(a):
            raise ValueError(
                "phi exact mode needs a finite-support set; pass a scan horizon instead"
            )
        size = support_size(a)
        if size == 0:
            return PhiResult(Fraction(0), True, None, 0, "empty set")
        best_num, best_den, best_at = 0, 1, None
        n = 0
        while True:
            if size * best_den < best_num * family.size_lower_bound(n):
                return PhiResult(
                    Fraction(best_num, best_den),
                    True,
                    best_at,
                    n,
                    f"certified: |A|/L({n}) < value",
                )
            w = family.window(n)
            c = intersect_card(a, w)
            if c * best_den > best_num * w.size:
                best_num, best_den, best_at = c, w.size, n
            n += 1
            if n > cap:
                raise ScanCapError(
                    f"phi scan passed {cap} indices without a certificate "
                    f"(best so far {best_num}/{best_den}); the set may miss every window"
                )
    else:
        if horizon < 0:
            raise ValueError("scan horizon must be nonnegative")
        num, den, at = _max_mu(family, a, 0, horizon)
        value = Fraction(num, den)
        if value == 1:
            return PhiResult(value, True, at, horizon, "attains the global bound 1")
        return PhiResult(value, False, at, horizon, f"max over indices 0..{horizon}")


def exh_trajectory(
    family: WindowFamily,
    a: IntegerSet,
    m_list: Iterable[int],
    horizon: int | None = None,
    scan_cap: int | None = None,
) -> Trajectory:
    """phi of the tails A ∖ [0, m] for each sampled cut m (nonincreasing).

    Finite-support sets get exact values; otherwise ``horizon`` selects
    the phi scan range and the samples are horizon-labeled lower bounds.
    """
    ms = list(m_list)
    if any(m < 0 for m in ms) or any(later <= cur for cur, later in zip(ms, ms[1:])):
        raise ValueError("cut points must be nonnegative and strictly increasing")
    samples = []
    notes: set[str] = set()
    for m in ms:
        res = phi(family, tail(a, m), horizon=horizon, scan_cap=scan_cap)
        samples.append((m, res.value))
        notes.add("exact" if res.exact else f"lower bound at index horizon {res.scanned_to}")
    return Trajectory("exh", tuple(samples), notes=tuple(sorted(notes)))


# ---------------------------------------------------------------------------
# membership verdicts


@dataclass(frozen=True)
class TrendPolicy:
    """Doubling-window schedule and thresholds for trend classification.

    Windows are [2^k, 2^{k+1}) for k in [k_from, k_to]. Successive window
    maxima decaying by a factor of at most ``rho`` reads as a vanishing
    trend; maxima staying at or above ``delta`` on every window reads as
    a non-vanishing trend.
    """

    k_from: int = 4
    k_to: int = 16
    rho: Fraction = Fraction(3, 4)
    delta: Fraction = Fraction(1, 100)

    def __post_init__(self) -> None:
        if not (0 < self.rho < 1):
            raise ValueError("rho must lie in (0, 1)")
        if not (0 < self.delta < 1):
            raise ValueError("delta must lie in (0, 1)")
        if self.k_from < 0 or self.k_to < self.k_from:
            raise ValueError("bad window schedule")

    def index_windows(self) -> list[tuple[int, int]]:
        return [(1 << k, (1 << (k + 1)) - 1) for k in range(self.k_from, self.k_to + 1)]


class VerdictKind(str, Enum):
    MEMBER_EXACT = "member-exact"
    NON_MEMBER_EXACT = "non-member-exact"
    TREND_MEMBER = "trend-member"
    TREND_NON_MEMBER = "trend-non-member"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    """Membership diagnosis for the vanishing-density ideal of a family.

    Exact kinds carry a machine-checkable certificate in ``reason`` (and
    ``delta``/``witness`` for non-membership: mu_n >= delta on the
    witness index set). Trend kinds carry the windowed maxima that
    support them. ``horizon_note`` records the evidence scale.
    """

    kind: VerdictKind
    reason: str
    delta: Fraction | None = None
    witness: str | None = None
    witness_indices: IntervalSet | None = None
    estimate: Fraction | None = None
    window_maxima: tuple[tuple[int, int, Fraction], ...] = ()
    horizon_note: str | None = None

    @property
    def conclusive(self) -> bool:
        return self.kind is not VerdictKind.INCONCLUSIVE

    @property
    def exact(self) -> bool:
        return self.kind in (VerdictKind.MEMBER_EXACT, VerdictKind.NON_MEMBER_EXACT)

    @property
    def member_like(self) -> bool:
        return self.kind in (VerdictKind.MEMBER_EXACT, VerdictKind.TREND_MEMBER)


def verdict_record(v: Verdict) -> str:
    """Single-line, byte-stable JSON record of a verdict."""
    payload = {
        "kind": v.kind.value,
        "reason": v.reason,
        "delta": frac_str(v.delta) if v.delta is not None else None,
        "witness": v.witness,
        "witness_indices": (
            [[lo, hi] for lo, hi in v.witness_indices.intervals]
            if v.witness_indices is not None
            else None
        ),
        "estimate": frac_str(v.estimate) if v.estimate is not None else None,
        "windows": [[lo, hi, frac_str(m)] for lo, hi, m in v.window_maxima],
        "horizon": v.horizon_note,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _clip_windows(policy: TrendPolicy, n_max: int | None) -> list[tuple[int, int]]:
    if n_max is None:
        return policy.index_windows()
    out = []
    for lo, hi in policy.index_windows():
        if lo > n_max:
            break
        out.append((lo, min(hi, n_max)))
    return out


def member_verdict(
    family: WindowFamily, a: IntegerSet, policy: TrendPolicy | None = None
) -> Verdict:
    """Decide or diagnose membership of A in the family's vanishing ideal.

    Certificate order:

    1. known-finite support — exact member (mu_n(A) <= |A|/L(n) -> 0);
    2. A is the registered full window union of this same family — exact
       non-member with delta = 1 (every window lies inside A);
    3. A contains an unbounded interval tail [c, ∞) — exact non-member:
       mu_n(A) >= 1 - c/L(n), so mu_n >= 1/2 once L(n) >= 2c;
    4. otherwise, trend classification of windowed maxima under
       ``policy``; horizon problems surface as Inconclusive, never as a
       wrong verdict.
    """
    policy = policy or TrendPolicy()

    if is_finite(a):
        size = support_size(a)
        top = max_element(a)
        return Verdict(
            VerdictKind.MEMBER_EXACT,
            reason=(
                f"finite support: |A| = {size}, max A = {top}; "
                f"mu_n(A) <= {size}/L(n) -> 0 by the size certificate"
            ),
            horizon_note="exact at every index",
        )

    prov = getattr(a, "provenance", None)
    if prov == ("family-union",) + family.key:
        return Verdict(
            VerdictKind.NON_MEMBER_EXACT,
            reason="A is the union of this family's windows, so F_n ⊆ A and mu_n(A) = 1 for all n",
            delta=Fraction(1),
            witness="all indices n >= 0",
            witness_indices=IntervalSet(((0, None),)),
            horizon_note="closed form, no scan needed",
        )

    if isinstance(a, IntervalSet) and a.intervals and a.intervals[-1][1] is None:
        c = a.intervals[-1][0]
        if c == 0:
            return Verdict(
                VerdictKind.NON_MEMBER_EXACT,
                reason="A contains every nonnegative integer from 0 on; mu_n(A) = 1 for all n",
                delta=Fraction(1),
                witness="all indices n >= 0",
                witness_indices=IntervalSet(((0, None),)),
                horizon_note="closed form, no scan needed",
            )
        n_star = None
        limit = family.n_max if family.n_max is not None else _scan_cap(None)
        for n in range(limit + 1):
            if family.size_lower_bound(n) >= 2 * c:
                n_star = n
                break
        if n_star is not None:
            return Verdict(
                VerdictKind.NON_MEMBER_EXACT,
                reason=(
                    f"A contains the tail [{c}, ∞); mu_n(A) >= 1 - {c}/L(n), "
                    f"and L({n_star}) >= {2 * c}"
                ),
                delta=Fraction(1, 2),
                witness=f"all indices n >= {n_star}",
                witness_indices=IntervalSet(((n_star, None),)),
                horizon_note="closed form via the size certificate",
            )

    windows = _clip_windows(policy, family.n_max)
    if len(windows) < 2:
        return Verdict(
            VerdictKind.INCONCLUSIVE,
            reason="family index range too short for the trend window schedule",
            horizon_note=f"family n_max = {family.n_max}",
        )
    maxima: list[tuple[int, int, Fraction]] = []
    try:
        for lo, hi in windows:
            maxima.append((lo, hi, upper_density(family, a, lo, hi)))
    except HorizonError as exc:
        return Verdict(
            VerdictKind.INCONCLUSIVE,
            reason=f"horizon exceeded during trend scan: {exc}",
            window_maxima=tuple(maxima),
            horizon_note="partial scan only",
        )
    except FamilyRangeError as exc:
        return Verdict(
            VerdictKind.INCONCLUSIVE,
            reason=f"family range exceeded during trend scan: {exc}",
            window_maxima=tuple(maxima),
            horizon_note="partial scan only",
        )
    values = [m for _, _, m in maxima]
    note = f"windowed maxima over [{windows[0][0]}, {windows[-1][1]}]"
    if all(nxt <= policy.rho * cur for cur, nxt in zip(values, values[1:])):
        return Verdict(
            VerdictKind.TREND_MEMBER,
            reason=f"window maxima decay by factor <= {frac_str(policy.rho)} at every step",
            estimate=values[-1],
            window_maxima=tuple(maxima),
            horizon_note=note,
        )
    if all(v >= policy.delta for v in values):
        return Verdict(
            VerdictKind.TREND_NON_MEMBER,
            reason=f"window maxima stay >= {frac_str(policy.delta)} on every window",
            delta=policy.delta,
            estimate=values[-1],
            window_maxima=tuple(maxima),
            horizon_note=note,
        )
    return Verdict(
        VerdictKind.INCONCLUSIVE,
        reason="windowed maxima neither decay geometrically nor stay bounded away from 0",
        estimate=values[-1],
        window_maxima=tuple(maxima),
        horizon_note=note,
    )
