"""Exact two-sided subshifts of finite type.

Points are stored as eventually periodic sequences (left cycle, finite core,
right cycle), so the shift map, the b^(-m) metric, periodic-orbit enumeration
and the shadowing/closing constructions all run on finite data with no
approximation.  Symbols are integers 0..k-1 and words are tuples of symbols.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm, log
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .budget import enumeration_budget
from .errors import BudgetExceeded, NotClosable, NotPrimitive

Word = tuple

DEFAULT_METRIC_BASE = 2.0


def as_word(symbols) -> Word:
    return tuple(int(a) for a in symbols)


def least_period(word: Word) -> int:
    k = len(word)
    for p in range(1, k + 1):
        if k % p == 0 and word[:p] * (k // p) == word:
            return p
    return k


def min_rotation(word: Word) -> Word:
    return min(word[i:] + word[:i] for i in range(len(word)))


class Sft:
    """Two-sided subshift of finite type on symbols 0..k-1.

    ``transitions[a][b] == 1`` means symbol ``b`` may follow symbol ``a``.
    The matrix must be primitive (some power entrywise positive); the least
    such power is the mixing constant and is computed at construction.
    """

    def __init__(self, alphabet_size, transitions, metric_base=DEFAULT_METRIC_BASE):
        k = int(alphabet_size)
        if k < 1:
            raise ValueError("alphabet_size must be >= 1")
        t = np.asarray(transitions, dtype=np.int64)
        if t.shape != (k, k):
            raise ValueError(f"transitions must be {k}x{k}, got {t.shape}")
        if not np.isin(t, (0, 1)).all():
            raise ValueError("transitions entries must be 0 or 1")
        if (t.sum(axis=1) == 0).any():
            raise ValueError("transition matrix has an all-zero row")
        if (t.sum(axis=0) == 0).any():
            raise ValueError("transition matrix has an all-zero column")
        if not metric_base > 1.0:
            raise ValueError("metric_base must be > 1")
        self.alphabet_size = k
        self.transitions = t
        self.transitions.setflags(write=False)
        self.metric_base = float(metric_base)
        self.mixing_constant = self._find_mixing_constant()
        self._successors = tuple(
            tuple(int(b) for b in range(k) if t[a, b]) for a in range(k)
        )
        self._predecessors = tuple(
            tuple(int(a) for a in range(k) if t[a, b]) for b in range(k)
        )

    def _find_mixing_constant(self) -> int:
        k = self.alphabet_size
        power = self.transitions.astype(bool)
        t = self.transitions.astype(bool)
        for s in range(1, k * k + 1):
            if power.all():
                return s
            power = (power.astype(np.int64) @ t.astype(np.int64)) > 0
        raise NotPrimitive(
            f"no power of the transition matrix up to {k * k} is entrywise positive"
        )

    @property
    def theta(self) -> float:
        """Exact contraction rate of the metric: theta = log(metric_base)."""
        return log(self.metric_base)

    def allows(self, a: int, b: int) -> bool:
        return bool(self.transitions[a, b])

    def successors(self, a: int) -> tuple:
        return self._successors[a]

    def predecessors(self, b: int) -> tuple:
        return self._predecessors[b]

    def admissible(self, word) -> bool:
        word = as_word(word)
        if any(a < 0 or a >= self.alphabet_size for a in word):
            return False
        return all(self.allows(a, b) for a, b in zip(word, word[1:]))

    def cyclically_admissible(self, word) -> bool:
        word = as_word(word)
        return self.admissible(word) and bool(word) and self.allows(word[-1], word[0])

    def reach_tables(self, max_steps: int):
        """Boolean reachability: tables[m][a][b] iff a path a->b with m edges exists."""
        k = self.alphabet_size
        tables = [np.eye(k, dtype=bool)]
        t = self.transitions.astype(bool)
        for _ in range(max_steps):
            tables.append((tables[-1].astype(np.int64) @ t.astype(np.int64)) > 0)
        return tables

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Sft):
            return NotImplemented
        return (
            self.alphabet_size == other.alphabet_size
            and self.metric_base == other.metric_base
            and (self.transitions == other.transitions).all()
        )

    def __hash__(self):
        return hash(
            (self.alphabet_size, self.metric_base, self.transitions.tobytes())
        )

    def __repr__(self):
        rows = ",".join("".join(str(int(v)) for v in row) for row in self.transitions)
        return f"Sft(k={self.alphabet_size}, T=[{rows}], b={self.metric_base})"


def full_shift(alphabet_size, metric_base=DEFAULT_METRIC_BASE) -> Sft:
    k = int(alphabet_size)
    return Sft(k, np.ones((k, k), dtype=int), metric_base)


def golden_mean_shift(metric_base=DEFAULT_METRIC_BASE) -> Sft:
    return Sft(2, [[1, 1], [1, 0]], metric_base)


def count_admissible_words(s: Sft, length: int) -> int:
    """Exact count of admissible words, in exact integer arithmetic."""
    if length <= 0:
        return 1
    k = s.alphabet_size
    counts = [1] * k  # completions per current end-symbol
    t = s.transitions
    for _ in range(length - 1):
        counts = [sum(counts[b] for b in s.successors(a)) for a in range(k)]
    return sum(counts)


def admissible_words(s: Sft, length: int, budget=None) -> list:
    """All admissible words of the given length, in lexicographic order."""
    cap = enumeration_budget(budget)
    total = count_admissible_words(s, length)
    if total > cap:
        raise BudgetExceeded(
            f"{total} admissible words of length {length} exceed budget {cap}"
        )
    if length <= 0:
        return [()]
    words = [(a,) for a in range(s.alphabet_size)]
    for _ in range(length - 1):
        words = [w + (b,) for w in words for b in s.successors(w[-1])]
    return words


class SymbolicPoint:
    """Bi-infinite admissible sequence, eventually periodic on both sides.

    The left cycle repeats to -infinity ending just before ``core_start``;
    the core occupies ``[core_start, core_start + len(core))``; the right
    cycle repeats from ``core_start + len(core)`` onward.  ``symbol_at`` is
    total and exact for every integer index.
    """

    __slots__ = ("sft", "left_cycle", "core", "core_start", "right_cycle")

    def __init__(self, sft, left_cycle, core, core_start, right_cycle):
        left_cycle = as_word(left_cycle)
        core = as_word(core)
        right_cycle = as_word(right_cycle)
        if not left_cycle or not right_cycle:
            raise ValueError("left and right cycles must be nonempty")
        if not sft.cyclically_admissible(left_cycle):
            raise ValueError(f"left cycle {left_cycle} not cyclically admissible")
        if not sft.cyclically_admissible(right_cycle):
            raise ValueError(f"right cycle {right_cycle} not cyclically admissible")
        if not sft.admissible(core):
            raise ValueError(f"core {core} not admissible")
        first_after_left = core[0] if core else right_cycle[0]
        if not sft.allows(left_cycle[-1], first_after_left):
            raise ValueError("junction left cycle -> core/right cycle inadmissible")
        if core and not sft.allows(core[-1], right_cycle[0]):
            raise ValueError("junction core -> right cycle inadmissible")
        self.sft = sft
        self.left_cycle = left_cycle
        self.core = core
        self.core_start = int(core_start)
        self.right_cycle = right_cycle

    @property
    def core_end(self) -> int:
        return self.core_start + len(self.core)

    def symbol_at(self, n: int) -> int:
        if n < self.core_start:
            return self.left_cycle[(n - self.core_start) % len(self.left_cycle)]
        if n < self.core_end:
            return self.core[n - self.core_start]
        return self.right_cycle[(n - self.core_end) % len(self.right_cycle)]

    def symbols(self, lo: int, hi: int) -> Word:
        """Symbols at indices lo..hi-1."""
        return tuple(self.symbol_at(n) for n in range(lo, hi))

    def window(self, center: int, radius: int) -> Word:
        return self.symbols(center - radius, center + radius + 1)

    def shift(self, k: int) -> "SymbolicPoint":
        return SymbolicPoint(
            self.sft, self.left_cycle, self.core, self.core_start - k, self.right_cycle
        )

    def _agreement_bound(self, other) -> tuple:
        lo = min(self.core_start, other.core_start)
        hi = max(self.core_end, other.core_end)
        pl = lcm(len(self.left_cycle), len(other.left_cycle))
        pr = lcm(len(self.right_cycle), len(other.right_cycle))
        return lo - pl, hi + pr

    def __eq__(self, other):
        if not isinstance(other, SymbolicPoint):
            return NotImplemented
        if self.sft != other.sft:
            return False
        # Both tails are periodic beyond the cores, so agreement on one full
        # common period on each side pins the whole sequence.
        lo, hi = self._agreement_bound(other)
        return all(self.symbol_at(n) == other.symbol_at(n) for n in range(lo, hi))

    def __hash__(self):
        return hash((self.sft.alphabet_size, self.symbols(-4, 5)))

    def __repr__(self):
        def w(word):
            return "".join(str(a) for a in word)

        return (
            f"SymbolicPoint(...{w(self.left_cycle)}|{w(self.core)}"
            f"@{self.core_start}|{w(self.right_cycle)}...)"
        )


def periodic_point(s: Sft, word, origin: int = 0) -> SymbolicPoint:
    """Periodization of ``word``: symbol at n is word[(n - origin) mod len]."""
    word = as_word(word)
    if not s.cyclically_admissible(word):
        raise ValueError(f"word {word} is not cyclically admissible")
    return SymbolicPoint(s, word, (), origin, word)


class PeriodicOrbit:
    """Canonical representative of a finite shift orbit.

    The stored word is primitive (so ``period`` is the least period) and is
    the lexicographically smallest among its rotations; constructing from any
    rotation or power yields the same object.
    """

    __slots__ = ("sft", "word")

    def __init__(self, sft, word):
        word = as_word(word)
        if not word:
            raise ValueError("orbit word must be nonempty")
        if not sft.cyclically_admissible(word):
            raise ValueError(f"word {word} is not cyclically admissible")
        word = word[: least_period(word)]
        self.sft = sft
        self.word = min_rotation(word)

    @property
    def period(self) -> int:
        return len(self.word)

    def symbol_at(self, n: int) -> int:
        return self.word[n % self.period]

    def window_at(self, phase: int, radius: int) -> Word:
        k = self.period
        return tuple(self.word[(phase + j) % k] for j in range(-radius, radius + 1))

    def point(self, phase: int = 0) -> SymbolicPoint:
        rotated = self.word[phase % self.period :] + self.word[: phase % self.period]
        return periodic_point(self.sft, rotated)

    def sort_key(self):
        return (self.period, self.word)

    def __eq__(self, other):
        if not isinstance(other, PeriodicOrbit):
            return NotImplemented
        return self.sft == other.sft and self.word == other.word

    def __hash__(self):
        return hash(self.word)

    def __repr__(self):
        return f"PeriodicOrbit({''.join(str(a) for a in self.word)})"


# ---------------------------------------------------------------------------
# operations


def shift(x: SymbolicPoint, k: int) -> SymbolicPoint:
    """The shift map sigma^k: (sigma^k x)_n = x_{n+k}."""
    return x.shift(k)


class MetricValue(NamedTuple):
    value: float
    agrees_to_horizon: bool


def first_disagreement(x, y, horizon: Optional[int] = None) -> Optional[int]:
    """Least |n| with x_n != y_n, or None if they agree within the horizon.

    With ``horizon=None`` the horizon is taken large enough that agreement is
    conclusive (both points are eventually periodic), making the result exact.
    """
    if horizon is None:
        lo, hi = x._agreement_bound(y)
        horizon = max(abs(lo), abs(hi))
    for m in range(horizon + 1):
        if x.symbol_at(m) != y.symbol_at(m) or x.symbol_at(-m) != y.symbol_at(-m):
            return m
    return None


def metric(x: SymbolicPoint, y: SymbolicPoint, horizon: Optional[int] = None) -> MetricValue:
    """d(x, y) = b^(-m) with m the least |n| where the points disagree.

    Returns 0 with the ``agrees_to_horizon`` flag set when no disagreement is
    found within the horizon (exact equality when ``horizon=None``).
    """
    m = first_disagreement(x, y, horizon)
    if m is None:
        return MetricValue(0.0, True)
    return MetricValue(x.sft.metric_base ** (-m), False)


def mixing_constant(s: Sft) -> int:
    """Least S with T^S entrywise positive (computed at Sft construction)."""
    return s.mixing_constant


def _count_cyclic_words(s: Sft, length: int) -> int:
    """trace(T^n) in exact integer arithmetic."""
    k = s.alphabet_size
    t = [[int(v) for v in row] for row in s.transitions]
    power = [row[:] for row in t]
    for _ in range(length - 1):
        power = [
            [sum(power[i][m] * t[m][j] for m in range(k)) for j in range(k)]
            for i in range(k)
        ]
    return sum(power[i][i] for i in range(k))


def _cyclic_words(s: Sft, length: int, reach) -> list:
    """All admissible words of given length whose wrap transition is allowed."""
    out = []
    stack = [(a, (a,)) for a in reversed(range(s.alphabet_size))]
    while stack:
        start, word = stack.pop()
        pos = len(word)
        if pos == length:
            if s.allows(word[-1], start):
                out.append(word)
            continue
        remaining = length - pos
        for b in reversed(s.successors(word[-1])):
            # prune: need a path of `remaining` edges from b back to start
            if reach[remaining][b][start]:
                stack.append((start, word + (b,)))
    return out


def enumerate_periodic_orbits(s: Sft, max_period: int, budget=None) -> list:
    """Canonical orbits of least period <= max_period, sorted by (period, word)."""
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    cap = enumeration_budget(budget)
    candidates = sum(_count_cyclic_words(s, n) for n in range(1, max_period + 1))
    if candidates > cap:
        raise BudgetExceeded(
            f"{candidates} cyclic words up to period {max_period} exceed budget {cap}"
        )
    reach = s.reach_tables(max_period)
    orbits = []
    for n in range(1, max_period + 1):
        for word in _cyclic_words(s, n, reach):
            if least_period(word) == n and word == min_rotation(word):
                orbits.append(PeriodicOrbit(s, word))
    orbits.sort(key=PeriodicOrbit.sort_key)
    return orbits


def smallest_connector(s: Sft, a: int, b: int, length: int) -> Optional[Word]:
    """Lexicographically smallest word u of given length with a->u->b admissible."""
    reach = s.reach_tables(length + 1)
    if not reach[length + 1][a][b]:
        return None
    word = []
    prev = a
    for pos in range(length):
        steps_left = length - pos  # edges from candidate to b
        for c in s.successors(prev):
            if reach[steps_left][c][b]:
                word.append(c)
                prev = c
                break
    return tuple(word)


def minimal_connector(s: Sft, a: int, b: int) -> Word:
    """Shortest (then lexicographically smallest) connector from a to b."""
    for m in range(s.mixing_constant):
        u = smallest_connector(s, a, b, m)
        if u is not None:
            return u
    # mixing constant guarantees length S-1 always works
    raise AssertionError("unreachable: primitive SFT must admit a connector")


@dataclass(frozen=True)
class ShadowResult:
    """Periodic shadow of an orbit segment.

    ``point`` is the aligned periodic point (it copies ``x`` on the segment);
    ``orbit`` is its canonical orbit; ``period`` is the constructed period
    n+S (or 2n+S centered), always a multiple of ``orbit.period``.
    """

    orbit: PeriodicOrbit
    point: SymbolicPoint
    period: int
    connector: Word
    segment_start: int
    segment_length: int


def shadow_segment(s: Sft, x: SymbolicPoint, n: int, centered: bool = False) -> ShadowResult:
    """Construct the periodic point shadowing x on [0, n] (or [-n, n] centered).

    The shadow copies the segment's symbols and closes up through the
    lexicographically smallest connector of length S-1, giving period n+S
    (2n+S centered).  The exponential bound d(sigma^j p, sigma^j x) <
    b^(-min(j, n-j)) then holds exactly, by construction.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    S = s.mixing_constant
    lo = -n if centered else 0
    block = x.symbols(lo, n + 1)
    conn = smallest_connector(s, x.symbol_at(n), x.symbol_at(lo), S - 1)
    assert conn is not None
    word = block + conn
    point = periodic_point(s, word, origin=lo)
    return ShadowResult(
        orbit=PeriodicOrbit(s, word),
        point=point,
        period=len(word),
        connector=conn,
        segment_start=lo,
        segment_length=len(block),
    )


def shadow_bound_rows(s: Sft, result: ShadowResult, x: SymbolicPoint, n: int) -> list:
    """Exact per-step distances versus the specification bound b^(-min(j, n-j)).

    For a centered shadow the roles are played by the segment start and the
    doubled length, matching the construction.
    """
    seg_len = result.segment_length - 1  # number of steps along the segment
    start = result.segment_start
    rows = []
    for j in range(seg_len + 1):
        d = metric(result.point.shift(start + j), x.shift(start + j)).value
        bound = s.metric_base ** (-min(j, seg_len - j))
        rows.append((j, d, bound))
    return rows


@dataclass(frozen=True)
class ClosingResult:
    orbit: PeriodicOrbit
    closing_distance: Optional[float] = None
    c2: Optional[float] = None
    rows: Optional[tuple] = None


def anosov_close(s: Sft, w, check: bool = False) -> ClosingResult:
    """Close an admissible word into a periodic orbit.

    The closing precondition is that the wrap transition w[-1] -> w[0] is
    allowed (NotClosable otherwise).  With ``check`` set, a non-periodic point
    z through w is built and the realized closing constant
    C2 = max_j d(sigma^j z, sigma^j p) / (e^(-theta min(j, n-j)) d(sigma^n z, z))
    is measured exactly; the construction keeps it finite.
    """
    w = as_word(w)
    if not s.admissible(w):
        raise ValueError(f"word {w} is not admissible")
    if not s.allows(w[-1], w[0]):
        raise NotClosable(f"transition {w[-1]} -> {w[0]} is forbidden")
    orbit = PeriodicOrbit(s, w)
    if not check:
        return ClosingResult(orbit)
    n = len(w)
    p_point = periodic_point(s, w)

    # z agrees with the periodization on (-inf, n+m] and branches off at
    # n+m+1; scanning m finds the first index where a branch exists.
    branch = None
    for m in range(2 * s.alphabet_size ** 2 + n):
        idx = n + m + 1
        prev = w[(idx - 1) % n]
        periodic_symbol = w[idx % n]
        cands = [c for c in s.successors(prev) if c != periodic_symbol]
        if cands:
            branch = (m, min(cands))
            break
    if branch is None:
        # degenerate one-point shift: z = p and both sides of the bound are 0
        return ClosingResult(orbit, closing_distance=0.0, c2=0.0, rows=())
    m, c = branch
    copied = tuple(w[t % n] for t in range(n + m + 1))
    tail_transient, tail_cycle = _forward_tail(s, c)
    z = SymbolicPoint(
        s,
        left_cycle=w,
        core=copied + (c,) + tail_transient,
        core_start=0,
        right_cycle=tail_cycle,
    )
    horizon = n + m + 4 + len(tail_transient) + len(tail_cycle)
    d_close = metric(z.shift(n), z, horizon).value
    assert d_close > 0.0
    rows = []
    worst = 0.0
    theta = s.theta
    for j in range(n + 1):
        dj = metric(z.shift(j), p_point.shift(j), horizon).value
        envelope = np.exp(-theta * min(j, n - j)) * d_close
        ratio = dj / envelope
        worst = max(worst, ratio)
        rows.append((j, dj, envelope, ratio))
    return ClosingResult(orbit, closing_distance=d_close, c2=worst, rows=tuple(rows))


def _forward_tail(s: Sft, a: int) -> tuple:
    """Greedy lexicographic continuation from ``a``: (transient, cycle).

    The right-infinite word a, t_1, t_2, ... follows the smallest admissible
    successor at each step and is eventually periodic.
    """
    walk = []
    seen = {}
    cur = a
    while True:
        nxt = s.successors(cur)[0]
        if nxt in seen:
            i = seen[nxt]
            return tuple(walk[:i]), tuple(walk[i:])
        seen[nxt] = len(walk)
        walk.append(nxt)
        cur = nxt


def _backward_tail(s: Sft, a: int) -> tuple:
    """Greedy lexicographic left-extension of ``a``: (cycle, transient).

    Read left-to-right the tail is ...cycle cycle transient a.
    """
    walk = []
    seen = {}
    cur = a
    while True:
        prv = s.predecessors(cur)[0]
        if prv in seen:
            i = seen[prv]
            cycle = tuple(reversed(walk[i:]))
            transient = tuple(reversed(walk[:i]))
            return cycle, transient
        seen[prv] = len(walk)
        walk.append(prv)
        cur = prv


def point_through_window(s: Sft, window, left_index: int = None) -> SymbolicPoint:
    """Deterministic eventually-periodic point carrying ``window``.

    The window occupies [left_index, left_index + len); by default it is
    centered at 0.  Both tails extend greedily (lexicographically smallest).
    """
    window = as_word(window)
    if not window:
        raise ValueError("window must be nonempty")
    if not s.admissible(window):
        raise ValueError(f"window {window} is not admissible")
    if left_index is None:
        left_index = -(len(window) // 2)
    left_cycle, left_transient = _backward_tail(s, window[0])
    right_transient, right_cycle = _forward_tail(s, window[-1])
    return SymbolicPoint(
        s,
        left_cycle=left_cycle,
        core=left_transient + window + right_transient,
        core_start=left_index - len(left_transient),
        right_cycle=right_cycle,
    )


def transitive_point(s: Sft, depth: int, budget=None) -> SymbolicPoint:
    """Point whose forward orbit visits every admissible cylinder of length <= depth.

    Built by concatenating all admissible words of length ``depth`` (in
    lexicographic order) through minimal connectors, starting at index 0.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    words = admissible_words(s, depth, budget)
    built = list(words[0])
    for w in words[1:]:
        built.extend(minimal_connector(s, built[-1], w[0]))
        built.extend(w)
    left_cycle, left_transient = _backward_tail(s, built[0])
    right_transient, right_cycle = _forward_tail(s, built[-1])
    return SymbolicPoint(
        s,
        left_cycle=left_cycle,
        core=left_transient + tuple(built) + right_transient,
        core_start=-len(left_transient),
        right_cycle=right_cycle,
    )
