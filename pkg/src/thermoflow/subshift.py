"""Shifts of finite type and their higher-block presentations.

A one-sided SFT is described by an alphabet ``{0, ..., n-1}`` and a finite
set of forbidden words.  ``compile`` turns it into a :class:`BlockSystem`,
the 0/1 transition graph on admissible k-words that every spectral
computation in the package runs on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DepthError, EmptySystemError, InputError

Word = tuple[int, ...]

# Dyck alphabet: 0 = "(", 1 = ")", 2 = "[", 3 = "]"
DYCK_OPENERS = (0, 2)
DYCK_SYMBOLS = "()[]"


def as_word(symbols: Iterable[int]) -> Word:
    return tuple(int(a) for a in symbols)


def _check_symbols(w: Sequence[int], alphabet_size: int) -> None:
    for a in w:
        if not 0 <= a < alphabet_size:
            raise InputError(f"symbol {a} outside alphabet of size {alphabet_size}")


@dataclass(frozen=True)
class SftSpec:
    """Alphabet size plus forbidden words.  Duplicates are dropped and the
    words kept in sorted order so that equal specs compare equal."""

    alphabet_size: int
    forbidden_words: tuple[Word, ...] = ()
    label: str = ""

    def __post_init__(self):
        if int(self.alphabet_size) < 1:
            raise InputError("alphabet_size must be positive")
        words = set()
        for w in self.forbidden_words:
            w = as_word(w)
            if not w:
                raise InputError("forbidden words must be nonempty")
            _check_symbols(w, self.alphabet_size)
            words.add(w)
        object.__setattr__(self, "alphabet_size", int(self.alphabet_size))
        object.__setattr__(self, "forbidden_words", tuple(sorted(words)))

    @property
    def memory(self) -> int:
        return max((len(w) for w in self.forbidden_words), default=0)

    @property
    def _forbidden_set(self) -> frozenset:
        return frozenset(self.forbidden_words)


def full_shift(n: int, label: str | None = None) -> SftSpec:
    return SftSpec(n, (), label or f"full {n}-shift")


def golden_mean() -> SftSpec:
    return SftSpec(2, ((1, 1),), "golden mean")


def is_admissible(w: Sequence[int], s: SftSpec) -> bool:
    """True iff no forbidden word of ``s`` occurs as a factor of ``w``."""
    w = as_word(w)
    _check_symbols(w, s.alphabet_size)
    forbidden = s._forbidden_set
    lengths = {len(f) for f in forbidden}
    for L in lengths:
        for i in range(len(w) - L + 1):
            if w[i:i + L] in forbidden:
                return False
    return True


def _new_suffix_ok(w: Word, forbidden: frozenset, memory: int) -> bool:
    # checks only factors ending at the last symbol of w
    for L in range(1, min(memory, len(w)) + 1):
        if w[-L:] in forbidden:
            return False
    return True


def admissible_words(s: SftSpec, n: int) -> list[Word]:
    """All admissible words of length ``n`` in lexicographic order."""
    if n < 0:
        raise InputError("word length must be nonnegative")
    forbidden, memory = s._forbidden_set, s.memory
    words: list[Word] = [()]
    for _ in range(n):
        words = [w + (a,) for w in words for a in range(s.alphabet_size)
                 if _new_suffix_ok(w + (a,), forbidden, memory)]
    return words


def _raw_graph(s: SftSpec, k: int) -> tuple[list[Word], list[list[int]]]:
    """Unpruned k-block graph: admissible k-words and adjacency lists."""
    states = admissible_words(s, k)
    index = {w: i for i, w in enumerate(states)}
    forbidden, memory = s._forbidden_set, s.memory
    succ: list[list[int]] = []
    for u in states:
        out = []
        for a in range(s.alphabet_size):
            w = u + (a,)
            v = index.get(w[1:])
            if v is not None and _new_suffix_ok(w, forbidden, memory):
                out.append(v)
        succ.append(out)
    return states, succ


@dataclass(frozen=True, eq=False)
class BlockSystem:
    """Essential higher-block graph of an SFT.

    ``states[i]`` is an admissible k-word; ``transition[i, j] == 1`` iff the
    (k+1)-word ``edge_word(i, j)`` is admissible.
    """

    spec: SftSpec
    depth: int
    states: tuple[Word, ...]
    transition: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.transition.setflags(write=False)
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(self.states)})

    @property
    def size(self) -> int:
        return len(self.states)

    def index(self, w: Sequence[int]) -> int:
        return self._index[as_word(w)]

    def edge_word(self, i: int, j: int) -> Word:
        return self.states[i] + self.states[j][-1:]

    def edges(self) -> list[tuple[int, int]]:
        rows, cols = np.nonzero(self.transition)
        return list(zip(rows.tolist(), cols.tolist()))


def _essential_indices(succ: list[list[int]]) -> list[int]:
    n = len(succ)
    alive = [True] * n
    changed = True
    while changed:
        changed = False
        indeg = [0] * n
        outdeg = [0] * n
        for u in range(n):
            if not alive[u]:
                continue
            for v in succ[u]:
                if alive[v]:
                    outdeg[u] += 1
                    indeg[v] += 1
        for u in range(n):
            if alive[u] and (indeg[u] == 0 or outdeg[u] == 0):
                alive[u] = False
                changed = True
    return [u for u in range(n) if alive[u]]


def compile(s: SftSpec, k: int) -> BlockSystem:
    """Higher-block presentation of ``s`` on k-words, pruned to its essential part."""
    if k < max(1, s.memory - 1):
        raise DepthError(f"depth {k} < max(1, memory - 1) = {max(1, s.memory - 1)}")
    states, succ = _raw_graph(s, k)
    if not states:
        raise EmptySystemError(f"{s.label or 'spec'} has no admissible {k}-word")
    keep = _essential_indices(succ)
    if not keep:
        raise EmptySystemError(f"{s.label or 'spec'} has no infinite admissible sequence")
    new = {old: i for i, old in enumerate(keep)}
    A = np.zeros((len(keep), len(keep)), dtype=np.int64)
    for old in keep:
        for v in succ[old]:
            if v in new:
                A[new[old], new[v]] = 1
    return BlockSystem(s, k, tuple(states[i] for i in keep), A)


def subsystem_check(Y: SftSpec, X: SftSpec) -> bool:
    """True iff every X-forbidden word is already excluded from Y."""
    if Y.alphabet_size != X.alphabet_size:
        raise InputError("subsystem and ambient spec use different alphabets")
    return all(not is_admissible(w, Y) for w in X.forbidden_words)


def _transfer_count(states: list[Word], succ: list[list[int]], steps: int) -> int:
    counts = [1] * len(states)
    for _ in range(steps):
        nxt = [0] * len(states)
        for u, c in enumerate(counts):
            if c:
                for v in succ[u]:
                    nxt[v] += c
        counts = nxt
    return sum(counts)


def count_words(s: SftSpec, n: int) -> int:
    """Number of admissible words of length ``n`` (exact integer)."""
    if n < 0:
        raise InputError("word length must be nonnegative")
    k = max(1, s.memory - 1)
    if n <= k:
        return len(admissible_words(s, n))
    states, succ = _raw_graph(s, k)
    return _transfer_count(states, succ, n - k)


def path_count(b: BlockSystem, n: int) -> int:
    """Number of length-``n`` words read along paths of the essential graph."""
    if n < 0:
        raise InputError("word length must be nonnegative")
    if n < b.depth:
        return len({w[:n] for w in b.states})
    succ = [np.flatnonzero(row).tolist() for row in b.transition]
    return _transfer_count(list(b.states), succ, n - b.depth)


def _canonical(pre: Word, period: Word) -> tuple[Word, Word]:
    p = len(period)
    for d in range(1, p + 1):
        if p % d == 0 and period[:d] * (p // d) == period:
            period = period[:d]
            break
    while pre and pre[-1] == period[-1]:
        pre = pre[:-1]
        period = period[-1:] + period[:-1]
    return pre, period


@dataclass(frozen=True)
class PointRep:
    """The eventually periodic sequence ``preperiod + period + period + ...``.

    Stored in canonical form (primitive period, shortest preperiod), so two
    representations of the same sequence compare equal.
    """

    preperiod: Word
    period: Word

    def __post_init__(self):
        pre, per = as_word(self.preperiod), as_word(self.period)
        if not per:
            raise InputError("period must be nonempty")
        pre, per = _canonical(pre, per)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    def symbol(self, i: int) -> int:
        if i < len(self.preperiod):
            return self.preperiod[i]
        return self.period[(i - len(self.preperiod)) % len(self.period)]

    def window(self, start: int, length: int) -> Word:
        return tuple(self.symbol(i) for i in range(start, start + length))

    def shift(self, n: int = 1) -> "PointRep":
        if n < 0:
            raise InputError("shift amount must be nonnegative")
        pre = self.preperiod
        if n <= len(pre):
            return PointRep(pre[n:], self.period)
        r = (n - len(pre)) % len(self.period)
        return PointRep((), self.period[r:] + self.period[:r])

    def is_admissible(self, s: SftSpec) -> bool:
        reps = -(-max(s.memory, 1) // len(self.period)) + 1
        return is_admissible(self.preperiod + self.period * reps, s)


def _check_dyck(w: Sequence[int]) -> Word:
    w = as_word(w)
    _check_symbols(w, 4)
    return w


def dyck_is_admissible(w: Sequence[int], alphabet_size: int = 4) -> bool:
    """Stack scan of a finite Dyck word.

    A closer met with an empty stack is accepted, since it may match an
    opener in the infinite past; trailing openers may close in the future.
    """
    if alphabet_size != 4:
        raise InputError("the Dyck shift needs exactly 4 symbols")
    stack: list[int] = []
    for a in _check_dyck(w):
        if a in DYCK_OPENERS:
            stack.append(a)
        elif not stack:
            continue
        elif stack[-1] == a - 1:
            stack.pop()
        else:
            return False
    return True


def dyck_count(n: int) -> int:
    """Number of admissible Dyck words of length ``n``.

    ``B[h]`` counts words of the remaining length readable from a stack of
    height ``h``; heights above ``n`` are never reached.
    """
    if n < 0:
        raise InputError("word length must be nonnegative")
    B = [1] * (n + 2)
    for _ in range(n):
        nxt = [0] * (n + 2)
        nxt[0] = 2 * B[1] + 2 * B[0]
        for h in range(1, n + 1):
            nxt[h] = 2 * B[h + 1] + B[h - 1]
        B = nxt
    return B[0]


def parse_word(text: str, alphabet: str | None = None) -> Word:
    """``"0110"`` -> ``(0, 1, 1, 0)``; with ``alphabet="()[]"`` maps brackets."""
    if alphabet is None:
        return tuple(int(c) for c in text)
    return tuple(alphabet.index(c) for c in text)
