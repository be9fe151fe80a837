"""Record-layer type descriptors over a finite alphabet.

A type is a pair of letter sets, a lower row and an upper row, merged into a
single left-to-right token order.  Within each row the letters increase, the
lower row is nonempty, the two rows do not share their minimum, and the
rightmost token is the largest lower letter.  Tokens are written ``l<k>``
(lower) and ``u<k>`` (upper) inside brackets, e.g. ``"[u2 u3 l1 u4 l2]"``.

A type describes how records accumulate along a homogeneous set: the witness
of a type repeats each token's letter on a fast-growing schedule so that,
climbing through the witness, lower-row letters set records inside the
repeated block u and upper-row letters inside the closing block v.  Witness
block counts beyond a handful force run counts near 2**513, which is why the
word layer is run-length encoded.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .tree import (
    Node,
    NodeSet,
    ScaleLimit,
    empty_node,
    node_from_runs,
    record_table,
)
from .combs import NotHomogeneous

Token = tuple[int, int]  # (letter, row); row 0 = lower, 1 = upper

_SCALE_LIMIT = 4


@dataclass(frozen=True)
class TypeDescriptor:
    alphabet: int
    tokens: tuple[Token, ...]

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ValueError("empty token list")
        lower = [k for k, row in self.tokens if row == 0]
        upper = [k for k, row in self.tokens if row == 1]
        for k, row in self.tokens:
            if row not in (0, 1):
                raise ValueError(f"bad row {row}")
            if not 0 <= k < self.alphabet:
                raise ValueError(f"letter {k} outside alphabet {self.alphabet}")
        if not lower:
            raise ValueError("lower row must be nonempty")
        if lower != sorted(lower) or len(set(lower)) != len(lower):
            raise ValueError("lower row must strictly increase left to right")
        if upper != sorted(upper) or len(set(upper)) != len(upper):
            raise ValueError("upper row must strictly increase left to right")
        if upper and min(lower) == min(upper):
            raise ValueError("rows must not share their minimum letter")
        if self.tokens[-1] != (max(lower), 0):
            raise ValueError("rightmost token must be the largest lower letter")

    @property
    def tau0(self) -> frozenset[int]:
        return frozenset(k for k, row in self.tokens if row == 0)

    @property
    def tau1(self) -> frozenset[int]:
        return frozenset(k for k, row in self.tokens if row == 1)

    def __str__(self) -> str:
        return print_type(self)

    def __repr__(self) -> str:
        return f"TypeDescriptor({self.alphabet}, {print_type(self)})"


def parse_type(text: str, alphabet: int | None = None) -> TypeDescriptor:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError(f"type literal must be bracketed, got {text!r}")
    tokens: list[Token] = []
    for part in body[1:-1].split():
        if len(part) < 2 or part[0] not in "lu":
            raise ValueError(f"malformed token {part!r}")
        try:
            letter = int(part[1:])
        except ValueError:
            raise ValueError(f"malformed token {part!r}") from None
        tokens.append((letter, 0 if part[0] == "l" else 1))
    if alphabet is None:
        alphabet = max((k for k, _ in tokens), default=0) + 1
    return TypeDescriptor(alphabet, tuple(tokens))


def print_type(tau: TypeDescriptor) -> str:
    return "[" + " ".join(("l" if row == 0 else "u") + str(k) for k, row in tau.tokens) + "]"


def max_of(tau: TypeDescriptor) -> int:
    return max(k for k, _ in tau.tokens)


def is_top_comb(tau: TypeDescriptor) -> bool:
    """The second token from the right sits in the upper row."""
    return len(tau.tokens) >= 2 and tau.tokens[-2][1] == 1


def dominates(tau: TypeDescriptor, sigma: TypeDescriptor) -> bool:
    if tau.alphabet != sigma.alphabet:
        raise ValueError("domination compares types over one alphabet")
    return is_top_comb(tau) and max_of(sigma) <= max(tau.tau1)


def relabel(tau: TypeDescriptor, iota: Sequence[int], alphabet_out: int) -> TypeDescriptor:
    """Push the type through a strictly increasing letter injection."""
    iota = tuple(iota)
    if len(iota) < tau.alphabet:
        raise ValueError(f"injection must cover all {tau.alphabet} letters")
    if any(a >= b for a, b in zip(iota, iota[1:])):
        raise ValueError("injection must be strictly increasing")
    return TypeDescriptor(alphabet_out, tuple((iota[k], row) for k, row in tau.tokens))


# ---------------------------------------------------------------------------
# enumeration


def _shuffles(lower: tuple, upper: tuple) -> Iterator[tuple]:
    if not lower:
        yield upper
        return
    if not upper:
        yield lower
        return
    for rest in _shuffles(lower[1:], upper):
        yield (lower[0],) + rest
    for rest in _shuffles(lower, upper[1:]):
        yield (upper[0],) + rest


@lru_cache(maxsize=None)
def enumerate_types(n: int) -> tuple[TypeDescriptor, ...]:
    """All types over alphabet n, canonically ordered (id = list position)."""
    if n < 1:
        raise ValueError("alphabet must be positive")
    if n > _SCALE_LIMIT:
        raise ScaleLimit(f"type enumeration supported up to alphabet {_SCALE_LIMIT}")
    letters = range(n)
    out = []
    for size0 in range(1, n + 1):
        for tau0 in itertools.combinations(letters, size0):
            for size1 in range(0, n + 1):
                for tau1 in itertools.combinations(letters, size1):
                    if tau1 and min(tau0) == min(tau1):
                        continue
                    last = (max(tau0), 0)
                    lower = tuple((k, 0) for k in tau0 if (k, 0) != last)
                    upper = tuple((k, 1) for k in tau1)
                    for body in _shuffles(lower, upper):
                        out.append(TypeDescriptor(n, body + (last,)))
    out.sort(key=lambda t: (len(t.tokens), print_type(t)))
    return tuple(out)


def j_count(n: int) -> int:
    """The number of types over alphabet n."""
    return len(enumerate_types(n))


def type_id(tau: TypeDescriptor) -> int:
    return enumerate_types(tau.alphabet).index(tau)


def type_by_id(alphabet: int, ident: int) -> TypeDescriptor:
    return enumerate_types(alphabet)[ident]


def catalogue_json(n: int) -> list[dict]:
    return [
        {"id": k, "text": print_type(tau), "max": max_of(tau), "top_comb": is_top_comb(tau)}
        for k, tau in enumerate(enumerate_types(n))
    ]


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class TypeWitnessSpec:
    """The two building blocks of a type's canonical witness.

    u repeats the lower-row letters in increasing order, v the upper-row
    letters; each token's letter appears r(token) times, where r is 1 on the
    leftmost token and jumps to 2**previous + 1 on each following one.  The
    jumps make every later token's run long enough to out-record all earlier
    ones, which is what pins the left-to-right order in the record structure.
    """

    tau: TypeDescriptor
    repetitions: tuple[tuple[Token, int], ...]
    u: Node
    v: Node


def witness_spec(tau: TypeDescriptor) -> TypeWitnessSpec:
    reps: dict[Token, int] = {}
    r = 1
    for pos, token in enumerate(tau.tokens):
        reps[token] = r
        if pos + 1 < len(tau.tokens):
            if r > 4096:
                # the next count would need 2**r bits just to store
                raise ScaleLimit(f"witness of {print_type(tau)} is not materializable")
            r = 2**r + 1
    u = node_from_runs(tau.alphabet, [(k, reps[(k, 0)]) for k in sorted(tau.tau0)])
    if tau.tau1:
        v = node_from_runs(tau.alphabet, [(k, reps[(k, 1)]) for k in sorted(tau.tau1)])
    else:
        v = u  # a pure lower-row type witnesses as a chain of u-blocks
    return TypeWitnessSpec(tau, tuple(sorted(reps.items())), u, v)


def type_witness(tau: TypeDescriptor, blocks: int) -> NodeSet:
    """{v, u+v, u+u+v, ...}: ``blocks`` elements."""
    if blocks < 1:
        raise ValueError(f"blocks must be positive, got {blocks}")
    spec = witness_spec(tau)
    elems = []
    word = empty_node(tau.alphabet)
    for _ in range(blocks):
        elems.append(word.concat(spec.v))
        word = word.concat(spec.u)
    return NodeSet(tau.alphabet, frozenset(elems))


# ---------------------------------------------------------------------------
# classification


class AmbiguousTruncation(ValueError):
    """Too few elements survive trimming to pin down a single type.

    Two-block witness prefixes of distinct types can be genuinely equivalent
    (the token interleaving only shows up once the repeated block occurs
    twice), so a three-element set that needs its boundary element discarded
    may match several types at once.
    """


@lru_cache(maxsize=None)
def _witness_tables(alphabet: int, count: int):
    table: dict = {}
    for tau in enumerate_types(alphabet):
        key = record_table(type_witness(tau, count))
        table.setdefault(key, []).append(tau)
    return {key: tuple(taus) for key, taus in table.items()}


def classify_type(a: NodeSet) -> TypeDescriptor:
    """The unique type whose witness matches ``a``.

    The whole set is matched first; only if that fails is the last element
    in the well order discarded as a truncation artifact and the rest
    matched.  Trimming first would lose real structure: a three-element
    witness minus its boundary element no longer determines its type.
    """
    if len(a) < 3:
        raise ValueError(f"need at least 3 elements to classify, got {len(a)}")
    whole = _witness_tables(a.alphabet, len(a)).get(record_table(a))
    if whole is not None and len(whole) == 1:
        return whole[0]
    trimmed = NodeSet(a.alphabet, frozenset(a.sorted_nodes[:-1]))
    matches = _witness_tables(a.alphabet, len(trimmed)).get(record_table(trimmed))
    if matches is None:
        raise NotHomogeneous(f"not homogeneous: {a}")
    if len(matches) > 1:
        raise AmbiguousTruncation(
            f"{len(matches)} types match after trimming: "
            + ", ".join(print_type(t) for t in matches)
        )
    return matches[0]


@lru_cache(maxsize=None)
def same_type_probes(
    alphabet: int,
    word_length: int | None = None,
    set_size: int = 3,
    per_type: int = 6,
) -> dict[TypeDescriptor, tuple[NodeSet, ...]]:
    """Deterministic pool of classified sets, bucketed by type.

    Enumerates every ``set_size``-element set of words up to ``word_length``
    letters in a fixed order and keeps the first ``per_type`` sets the
    classifier recognizes for each type.  Embedding actions are probed
    against these pools: a map whose action is well defined must send every
    pooled set of one type to sets of a single image type, so differently
    realized inputs of the same type expose maps that only look consistent
    on canonical witnesses.  Treat the result as read-only; it is cached.
    """
    if word_length is None:
        word_length = 4 if alphabet <= 2 else 3
    words: list[Node] = []
    for length in range(1, word_length + 1):
        for letters in itertools.product(range(alphabet), repeat=length):
            word = empty_node(alphabet)
            for letter in letters:
                word = word.extend(letter)
            words.append(word)
    pool: dict[TypeDescriptor, list[NodeSet]] = {tau: [] for tau in enumerate_types(alphabet)}
    needed = len(pool)
    full = 0
    for combo in itertools.combinations(words, set_size):
        candidate = NodeSet(alphabet, frozenset(combo))
        if len(candidate) != set_size:
            continue
        try:
            tau = classify_type(candidate)
        except ValueError:
            continue
        bucket = pool[tau]
        if len(bucket) < per_type:
            bucket.append(candidate)
            if len(bucket) == per_type:
                full += 1
                if full == needed:
                    break
    return {tau: tuple(bucket) for tau, bucket in pool.items()}
