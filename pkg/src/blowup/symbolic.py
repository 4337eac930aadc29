"""Word combinatorics for blow-up tilings.

Words are tuples of 1-based letters.  Everything here is independent of
geometry: the weights ``e`` and ``e_minus``, the index sets ``Omega_k``,
cylinder partitions and the relative/absolute address bookkeeping.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from .errors import InvalidWordError, LevelCapError, PreconditionError

Word = tuple[int, ...]

DEFAULT_MAX_LEVEL = 25


def max_level() -> int:
    """Level cap, overridable through ``BLOWUP_MAX_LEVEL``."""
    raw = os.environ.get("BLOWUP_MAX_LEVEL")
    if raw is None:
        return DEFAULT_MAX_LEVEL
    try:
        return int(raw)
    except ValueError:
        raise LevelCapError(f"BLOWUP_MAX_LEVEL must be an integer, got {raw!r}")


def check_level(k: int) -> None:
    if k < 0:
        raise PreconditionError(f"level must be >= 0, got {k}")
    cap = max_level()
    if k > cap:
        raise LevelCapError(f"level {k} exceeds cap {cap} (set BLOWUP_MAX_LEVEL to raise it)")


def word_key(w: Word) -> tuple[int, Word]:
    """Sort key: by length, then lexicographically."""
    return (len(w), w)


def sort_words(words: Iterable[Word]) -> tuple[Word, ...]:
    return tuple(sorted(words, key=word_key))


@dataclass(frozen=True)
class PowerVector:
    """Integer scaling powers ``a_1..a_N`` of the IFS maps."""

    a: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        object.__setattr__(self, "a", a)
        if len(a) < 2:
            raise PreconditionError("need at least two maps (N >= 2)")
        if any(x < 1 for x in a):
            raise PreconditionError(f"powers must be positive integers, got {a}")
        if reduce(math.gcd, a) != 1:
            raise PreconditionError(f"gcd of powers must be 1, got {a}")

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def a_max(self) -> int:
        return max(self.a)

    @property
    def a_min(self) -> int:
        return min(self.a)

    def letters(self) -> range:
        return range(1, self.n + 1)

    def validate(self, w: Sequence[int]) -> Word:
        w = tuple(w)
        for letter in w:
            if not (isinstance(letter, int) and 1 <= letter <= self.n):
                raise InvalidWordError(f"letter {letter!r} outside 1..{self.n} in word {w}")
        return w


def e_weight(w: Sequence[int], pv: PowerVector) -> int:
    """Sum of powers along the word; ``e(()) == 0``."""
    w = pv.validate(w)
    return sum(pv.a[i - 1] for i in w)


def e_minus(w: Sequence[int], pv: PowerVector) -> int:
    """Weight of the word with its last letter dropped."""
    w = pv.validate(w)
    return sum(pv.a[i - 1] for i in w[:-1])


def in_omega(w: Word, k: int, pv: PowerVector) -> bool:
    return len(w) > 0 and e_weight(w, pv) > k >= e_minus(w, pv)


def _omega_direct(k: int, pv: PowerVector) -> list[Word]:
    # depth-first: extend while the weight has not passed k
    out: list[Word] = []
    stack: list[tuple[Word, int]] = [((), 0)]
    while stack:
        prefix, weight = stack.pop()
        for i in pv.letters():
            w = prefix + (i,)
            ew = weight + pv.a[i - 1]
            if ew > k:
                out.append(w)
            else:
                stack.append((w, ew))
    return out


_OMEGA_CACHE: dict[tuple[tuple[int, ...], int], tuple[Word, ...]] = {}


def omega_level(k: int, pv: PowerVector) -> tuple[Word, ...]:
    """The words ``sigma`` with ``e(sigma) > k >= e_minus(sigma)``, sorted.

    Levels below ``a_max`` are enumerated directly; higher levels use
    ``Omega_k = disjoint union of i * Omega_{k - a_i}``.
    """
    check_level(k)
    key = (pv.a, k)
    if key in _OMEGA_CACHE:
        return _OMEGA_CACHE[key]
    for j in range(k + 1):
        if (pv.a, j) in _OMEGA_CACHE:
            continue
        if j < pv.a_max:
            words = _omega_direct(j, pv)
        else:
            words = [
                (i,) + w
                for i in pv.letters()
                for w in _OMEGA_CACHE[(pv.a, j - pv.a[i - 1])]
            ]
        _OMEGA_CACHE[(pv.a, j)] = sort_words(words)
    return _OMEGA_CACHE[key]


def omega_prime(k: int, omega_k: Iterable[Word], pv: PowerVector) -> tuple[Word, ...]:
    """Members of ``omega_k`` with weight exactly ``k + 1``."""
    return sort_words(w for w in omega_k if e_weight(w, pv) == k + 1)


def omega_step(k: int, omega_k: Iterable[Word], pv: PowerVector) -> tuple[Word, ...]:
    """Advance ``Omega_k`` to ``Omega_{k+1}``: words of weight ``k + 1``
    split into their ``N`` one-letter extensions, the rest carry over."""
    omega_k = tuple(omega_k)
    primed = set(omega_prime(k, omega_k, pv))
    kept = [w for w in omega_k if w not in primed]
    split = [w + (i,) for w in primed for i in pv.letters()]
    return sort_words(kept + split)


@dataclass(frozen=True)
class PartitionResult:
    ok: bool
    witness: Word | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def cylinder_partition_check(
    k: int, depth: int, pv: PowerVector, words: Iterable[Word] | None = None
) -> PartitionResult:
    """Check that every word of length ``depth`` has exactly one prefix in
    ``words`` (default ``Omega_k``).

    Walks the prefix trie instead of listing all ``N**depth`` words; the
    verdict and witness are the same as for the exhaustive scan.  Witnesses
    are padded with the letter 1 up to ``depth``.
    """
    words = set(omega_level(k, pv) if words is None else (tuple(w) for w in words))
    if not words:
        return PartitionResult(False, (1,) * depth, "empty word set")
    longest = max(len(w) for w in words)
    if depth < longest:
        raise PreconditionError(f"depth {depth} shorter than longest word ({longest})")

    prefixes = {w[:j] for w in words for j in range(len(w))}

    def pad(w: Word) -> Word:
        return w + (1,) * (depth - len(w))

    # a member that is a proper prefix of another member gives a double cover
    for w in sort_words(words):
        if w in prefixes:
            longer = min((u for u in words if len(u) > len(w) and u[: len(w)] == w), key=word_key)
            return PartitionResult(False, pad(longer), f"{format_word(w)} and {format_word(longer)} overlap")

    stack: list[Word] = [()]
    while stack:
        node = stack.pop()
        for i in sorted(pv.letters(), reverse=True):
            child = node + (i,)
            if child in words:
                continue
            if child in prefixes:
                stack.append(child)
            else:
                return PartitionResult(False, pad(child), f"no prefix of {format_word(pad(child))} is listed")
    return PartitionResult(True)


@dataclass(frozen=True)
class LabelledAddressSet:
    k: int
    entries: tuple[Word, ...]


def labelled_addresses(k: int, pv: PowerVector) -> LabelledAddressSet:
    """Relative addresses of ``T_k`` grown level by level: addresses of
    weight ``j + 1`` branch into their one-letter extensions, all others are
    carried over unchanged."""
    check_level(k)
    current = [(i,) for i in pv.letters()]
    for j in range(k):
        carried = [w for w in current if e_weight(w, pv) != j + 1]
        branched = [w + (i,) for w in current if e_weight(w, pv) == j + 1 for i in pv.letters()]
        current = carried + branched
    return LabelledAddressSet(k, sort_words(current))


@dataclass(frozen=True)
class AbsoluteAddress:
    """``theta.omega``: the tile ``f_{-theta} f_omega (A)``."""

    theta: Word
    omega: Word

    def __str__(self) -> str:
        return f"{format_word(self.theta)}.{format_word(self.omega)}"

    @classmethod
    def parse(cls, text: str) -> "AbsoluteAddress":
        if "." not in text:
            raise InvalidWordError(f"address {text!r} lacks a '.' separator")
        head, tail = text.split(".", 1)
        return cls(parse_word(head), parse_word(tail))


def normalize_address(theta: Word, omega: Word) -> AbsoluteAddress:
    """Cancel ``f_{theta_k}^{-1} f_{omega_1}`` pairs until the last letter of
    theta differs from the first letter of omega."""
    theta, omega = tuple(theta), tuple(omega)
    while theta and omega and theta[-1] == omega[0]:
        theta, omega = theta[:-1], omega[1:]
    return AbsoluteAddress(theta, omega)


def absolute_address_validate(addr: AbsoluteAddress, pv: PowerVector) -> bool:
    try:
        theta, omega = pv.validate(addr.theta), pv.validate(addr.omega)
    except InvalidWordError:
        return False
    if theta and omega and theta[-1] == omega[0]:
        return False
    return in_omega(omega, e_weight(theta, pv), pv)


@dataclass(frozen=True)
class EventuallyPeriodic:
    """The infinite word ``head + cycle + cycle + ...``."""

    head: Word
    cycle: Word

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise PreconditionError("eventually periodic word needs a nonempty cycle")

    def prefix(self, n: int) -> Word:
        out = list(self.head[:n])
        while len(out) < n:
            out.extend(self.cycle[: n - len(out)])
        return tuple(out)

    def prefix_reaching(self, weight: int, pv: PowerVector) -> Word:
        """Shortest prefix whose weight is at least ``weight``."""
        n = 0
        while e_weight(self.prefix(n), pv) < weight:
            n += 1
        return self.prefix(n)


def first_disagreement(theta: Sequence[int], omega: Sequence[int]) -> int | None:
    """1-based index of the first disagreement, ``None`` if equal.  A word
    that has ended disagrees with any letter."""
    theta, omega = tuple(theta), tuple(omega)
    if theta == omega:
        return None
    for idx in range(1, max(len(theta), len(omega)) + 1):
        if idx > len(theta) or idx > len(omega) or theta[idx - 1] != omega[idx - 1]:
            return idx
    return None  # pragma: no cover


def word_distance(theta: Sequence[int], omega: Sequence[int]) -> float:
    idx = first_disagreement(theta, omega)
    return 0.0 if idx is None else 2.0 ** (-idx)


def format_word(w: Sequence[int]) -> str:
    if any(letter > 9 for letter in w):
        # a trailing comma keeps one-letter words unambiguous
        text = ",".join(str(letter) for letter in w)
        return text + "," if len(w) == 1 else text
    return "".join(str(letter) for letter in w)


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "∅"):
        return ()
    try:
        if "," in text:
            return tuple(int(x) for x in text.split(",") if x.strip())
        return tuple(int(c) for c in text)
    except ValueError:
        raise InvalidWordError(f"cannot parse word {text!r}")
