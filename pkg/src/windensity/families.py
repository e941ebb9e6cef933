"""Window families F = (F_n): sequences of nonempty finite windows whose
sizes tend to infinity.

Each family carries, besides the window map itself, a certified size
lower bound L with L(n) <= |F_m| for every m >= n and L(n) -> ∞. That
certificate is what lets the density module turn the supremum over all
window indices into a finite, exact computation for finite-support sets.

Builtins:

* :func:`classical_prefix` — F_n = {1, ..., n} (natural density);
* :func:`factorial_blocks` — F_n = [n!, n!+n], pairwise disjoint blocks
  placed at factorial offsets;
* :func:`from_file` — windows read from a .fam file, one per line,
  inherently truncated at the file's last line.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .errors import FamilyRangeError, FormatError
from .sets import GeneratorSet, IntegerSet, IntervalSet, Window, interval_union

__all__ = [
    "WindowFamily",
    "classical_prefix",
    "factorial_blocks",
    "family_from_spec",
    "family_union",
    "from_file",
    "parse_fam",
    "union_of_windows",
]


@dataclass(frozen=True)
class WindowFamily:
    """The window sequence plus its size certificate.

    ``size_lower_bound(n)`` must satisfy: for every m >= n,
    |window(m)| >= size_lower_bound(n), and the bound is nondecreasing
    and tends to infinity (for file-backed families: within the file).
    ``disjoint_blocks`` is a hint only; it changes no semantics.
    """

    kind: str
    key: tuple
    label: str
    disjoint_blocks: bool
    n_max: int | None  # None = unbounded index range
    _window_fn: Callable[[int], Window] = field(compare=False, repr=False)
    _lower_bound_fn: Callable[[int], int] = field(compare=False, repr=False)

    def _check_index(self, n: int) -> None:
        if n < 0:
            raise FamilyRangeError(f"window index must be nonnegative, got {n}")
        if self.n_max is not None and n > self.n_max:
            raise FamilyRangeError(
                f"window index {n} out of range for {self.label} (max {self.n_max})"
            )

    def window(self, n: int) -> Window:
        self._check_index(n)
        return self._window_fn(n)

    def size_lower_bound(self, n: int) -> int:
        self._check_index(n)
        return self._lower_bound_fn(n)


def classical_prefix() -> WindowFamily:
    """F_n = {1, ..., n} for n >= 1 (index 0 maps to {1}); L(n) = max(n, 1)."""

    def win(n: int) -> Window:
        return Window.contiguous(1, max(n, 1))

    return WindowFamily(
        kind="classical",
        key=("classical",),
        label="classical-prefix",
        disjoint_blocks=False,
        n_max=None,
        _window_fn=win,
        _lower_bound_fn=lambda n: max(n, 1),
    )


class _FactorialLadder:
    """Incremental factorial evaluator tuned for ascending index scans."""

    def __init__(self) -> None:
        self.n = 0
        self.value = 1

    def __call__(self, n: int) -> int:
        if n < self.n:
            return math.factorial(n)
        v, m = self.value, self.n
        while m < n:
            m += 1
            v *= m
        self.n, self.value = m, v
        return v


def factorial_blocks() -> WindowFamily:
    """F_n = [n!, n!+n]; |F_n| = n+1 = L(n).

    Blocks are pairwise disjoint from n = 2 on (n!+n < (n+1)!); the n = 0
    window is {1} via the same closed form.
    """
    fact = _FactorialLadder()

    def win(n: int) -> Window:
        f = fact(n)
        return Window.contiguous(f, f + n)

    return WindowFamily(
        kind="factorial",
        key=("factorial",),
        label="factorial-blocks",
        disjoint_blocks=True,
        n_max=None,
        _window_fn=win,
        _lower_bound_fn=lambda n: n + 1,
    )


def parse_fam(text: str, path: str = "<fam>") -> list[Window]:
    """Parse the .fam format: one window per line, space-separated strictly
    increasing nonnegative integers; "#" starts a comment."""
    windows: list[Window] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values = [int(tok) for tok in line.split()]
        except ValueError:
            raise FormatError(f"not an integer token in {line!r}", line=lineno, path=path)
        if not values:
            raise FormatError("empty window", line=lineno, path=path)
        if any(v < 0 for v in values):
            raise FormatError("negative window element", line=lineno, path=path)
        if any(b <= a for a, b in zip(values, values[1:])):
            raise FormatError(
                "window elements must be strictly increasing", line=lineno, path=path
            )
        windows.append(Window.from_elements(values))
    if not windows:
        raise FormatError("family file declares no windows", path=path)
    return windows


def from_file(path: str) -> WindowFamily:
    """Load a file-backed family; indices beyond the last line are errors.

    The size lower bound is the right-to-left running minimum of the
    declared window sizes. A family whose final window is no larger than
    its first gives no visible evidence of |F_n| -> ∞; that only warns,
    since the condition concerns the unseen tail.
    """
    with open(path, "r", encoding="utf-8") as fh:
        windows = parse_fam(fh.read(), path=path)
    sizes = [w.size for w in windows]
    running: list[int] = list(sizes)
    for i in range(len(running) - 2, -1, -1):
        running[i] = min(running[i], running[i + 1])
    if len(sizes) > 1 and sizes[-1] <= sizes[0]:
        warnings.warn(
            f"{path}: declared window sizes do not grow across the file; "
            "|F_n| -> ∞ cannot be checked on a truncated family",
            stacklevel=2,
        )
    return WindowFamily(
        kind="file",
        key=("file", path),
        label=f"file:{path}",
        disjoint_blocks=False,
        n_max=len(windows) - 1,
        _window_fn=lambda n: windows[n],
        _lower_bound_fn=lambda n: running[n],
    )


def union_of_windows(family: WindowFamily, n_max: int) -> IntervalSet:
    """⋃_{n <= n_max} F_n, normalized; a truncation of the infinite union."""
    family._check_index(n_max)
    pairs: list[tuple[int, int]] = []
    for n in range(n_max + 1):
        w = family.window(n)
        if w.is_contiguous:
            pairs.append((w.lo, w.hi))
        else:
            pairs.extend((x, x) for x in w.explicit_elements)
    return interval_union(pairs, provenance=("truncated-union",) + family.key + (n_max,))


def _factorial_union_enumerator() -> Iterator[int]:
    last = -1
    for n in itertools.count():
        f = math.factorial(n)
        for x in range(max(f, last + 1), f + n + 1):
            yield x
            last = x


def family_union(family: WindowFamily, horizon: int | None = None) -> IntegerSet:
    """The full union ⋃_n F_n as an integer set.

    For the builtin families this is the genuine infinite union (the
    classical one is the cofinite interval [1, ∞); the factorial one is a
    generator-backed set certified up to ``horizon``). File-backed
    families only have their truncation, flagged as such.
    """
    prov = ("family-union",) + family.key
    if family.kind == "classical":
        return IntervalSet(((1, None),), provenance=prov)
    if family.kind == "factorial":
        h = horizon if horizon is not None else math.factorial(21)

        def member(x: int) -> bool:
            n = 0
            f = 1
            while f <= x:
                if x <= f + n:
                    return True
                n += 1
                f *= n
            return False

        return GeneratorSet(
            member,
            h,
            _factorial_union_enumerator,
            label="factorial-blocks-union",
            provenance=prov,
        )
    if family.n_max is None:
        raise ValueError(f"no closed-form union registered for family {family.label}")
    return union_of_windows(family, family.n_max)


def family_from_spec(spec: str) -> WindowFamily:
    """CLI/family grammar: "classical", "factorial", or "file:<path>"."""
    if spec == "classical":
        return classical_prefix()
    if spec == "factorial":
        return factorial_blocks()
    if spec.startswith("file:"):
        return from_file(spec[len("file:"):])
    raise FormatError(f"unknown family spec {spec!r} (expected classical|factorial|file:<path>)")
