"""Finite words over a fixed alphabet: the n-adic tree and its structure.

A node is a finite sequence of letters drawn from ``range(alphabet)``.  Nodes
are stored run-length encoded, as a tuple of ``(letter, count)`` runs with
arbitrary-precision counts.  The canonical witnesses used elsewhere repeat
letters on a doubly-exponential schedule, so run counts routinely exceed
anything a flat tuple could hold; every operation here works on runs and never
materialises letters unless explicitly asked.

Provided on top of the raw words:

* the prefix (extension) order and longest-common-prefix meets,
* the level-then-value well order ``prec`` (shorter words first, lexicographic
  within a level),
* record histories: the nodes where the running maximum letter increases
  while climbing from a node to an extension of it,
* meet- and record-closures of finite node sets,
* two structural equivalence deciders (first-move and record equivalence)
  together with their witness bijections,
* a re-embedding helper that rebuilds a node set with fresh padding while
  preserving its structure, used for randomised property tests.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional

Run = tuple[int, int]

# Guard for Node.letters: beyond this, materialising is a bug, not a need.
_MATERIALIZE_LIMIT = 1_000_000


class AlphabetMismatch(ValueError):
    """Operands live over different alphabets."""


class NotBelow(ValueError):
    """An operation required one node to be a strict extension of another."""


class ScaleLimit(ValueError):
    """A computation would leave the supported finite scale."""


def _normalize_runs(runs: Iterable[Run]) -> tuple[Run, ...]:
    out: list[list[int]] = []
    for letter, count in runs:
        if count < 0:
            raise ValueError(f"negative run count {count}")
        if count == 0:
            continue
        if out and out[-1][0] == letter:
            out[-1][1] += count
        else:
            out.append([letter, count])
    return tuple((l, c) for l, c in out)


@dataclass(frozen=True)
class Node:
    """One node of the tree: an RLE word over ``range(alphabet)``."""

    alphabet: int
    runs: tuple[Run, ...]
    length: int

    def __repr__(self) -> str:  # digits when small, runs otherwise
        if self.length == 0:
            return f"Node({self.alphabet}, e)"
        if self.length <= 40 and self.alphabet <= 10:
            return f"Node({self.alphabet}, {format_node(self)})"
        body = " ".join(f"{l}^{c}" for l, c in self.runs)
        return f"Node({self.alphabet}, {body})"

    @property
    def is_empty(self) -> bool:
        return self.length == 0

    @property
    def letters(self) -> tuple[int, ...]:
        if self.length > _MATERIALIZE_LIMIT:
            raise ScaleLimit(f"refusing to materialise {self.length} letters")
        out: list[int] = []
        for letter, count in self.runs:
            out.extend([letter] * count)
        return tuple(out)

    def letter_at(self, pos: int) -> int:
        if pos < 0 or pos >= self.length:
            raise IndexError(pos)
        seen = 0
        for letter, count in self.runs:
            seen += count
            if pos < seen:
                return letter
        raise IndexError(pos)  # unreachable

    def prefix(self, length: int) -> "Node":
        if length < 0 or length > self.length:
            raise ValueError(f"prefix length {length} out of range")
        if length == self.length:
            return self
        out: list[Run] = []
        left = length
        for letter, count in self.runs:
            if left <= 0:
                break
            take = min(count, left)
            out.append((letter, take))
            left -= take
        return Node(self.alphabet, tuple(out), length)

    def suffix_from(self, start: int) -> "Node":
        """The word consisting of positions ``start..`` of this node."""
        if start < 0 or start > self.length:
            raise ValueError(f"suffix start {start} out of range")
        skip = start
        out: list[Run] = []
        for letter, count in self.runs:
            if skip >= count:
                skip -= count
                continue
            out.append((letter, count - skip))
            skip = 0
        return Node(self.alphabet, _normalize_runs(out), self.length - start)

    def suffix_after(self, t: "Node") -> "Node":
        """The word r with t + r == self; requires t to be a prefix."""
        _check_alphabet(self, t)
        if not t.is_prefix_of(self):
            raise NotBelow(f"{t!r} is not a prefix of {self!r}")
        return self.suffix_from(t.length)

    def concat(self, other: "Node") -> "Node":
        _check_alphabet(self, other)
        return Node(
            self.alphabet,
            _normalize_runs(self.runs + other.runs),
            self.length + other.length,
        )

    def extend(self, letter: int, count: int = 1) -> "Node":
        if not 0 <= letter < self.alphabet:
            raise ValueError(f"letter {letter} outside alphabet {self.alphabet}")
        return Node(
            self.alphabet,
            _normalize_runs(self.runs + ((letter, count),)),
            self.length + count,
        )

    def repeat(self, times: int) -> "Node":
        """The word self + self + ... (``times`` copies)."""
        if times < 0:
            raise ValueError(times)
        if times == 0 or self.length == 0:
            return Node(self.alphabet, (), 0)
        if len(self.runs) == 1:
            letter, count = self.runs[0]
            return Node(self.alphabet, ((letter, count * times),), self.length * times)
        if times * len(self.runs) > 4_000_000:
            raise ScaleLimit(f"repeat would create {times * len(self.runs)} runs")
        return Node(
            self.alphabet,
            _normalize_runs(self.runs * times),
            self.length * times,
        )

    def is_prefix_of(self, other: "Node") -> bool:
        _check_alphabet(self, other)
        if self.length > other.length:
            return False
        k = len(self.runs)
        if k == 0:
            return True
        if k > len(other.runs):
            return False
        if self.runs[: k - 1] != other.runs[: k - 1]:
            return False
        letter, count = self.runs[k - 1]
        oletter, ocount = other.runs[k - 1]
        return letter == oletter and count <= ocount

    def strictly_below(self, other: "Node") -> bool:
        return self.length < other.length and self.is_prefix_of(other)


def _check_alphabet(a: Node, b: Node) -> None:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch(f"alphabet {a.alphabet} vs {b.alphabet}")


def node(alphabet: int, letters: Iterable[int] = ()) -> Node:
    """Build a node from an iterable of letters."""
    if alphabet < 1:
        raise ValueError(f"alphabet must be positive, got {alphabet}")
    runs: list[Run] = []
    n = 0
    for letter in letters:
        if not 0 <= letter < alphabet:
            raise ValueError(f"letter {letter} outside alphabet {alphabet}")
        if runs and runs[-1][0] == letter:
            runs[-1] = (letter, runs[-1][1] + 1)
        else:
            runs.append((letter, 1))
        n += 1
    return Node(alphabet, tuple(runs), n)


def node_from_runs(alphabet: int, runs: Iterable[Run]) -> Node:
    if alphabet < 1:
        raise ValueError(f"alphabet must be positive, got {alphabet}")
    normal = _normalize_runs(runs)
    for letter, _ in normal:
        if not 0 <= letter < alphabet:
            raise ValueError(f"letter {letter} outside alphabet {alphabet}")
    return Node(alphabet, normal, sum(c for _, c in normal))


def empty_node(alphabet: int) -> Node:
    return node(alphabet, ())


def parse_node(alphabet: int, text: str) -> Node:
    """Parse a digit-string literal; "" and "e" denote the empty word."""
    text = text.strip()
    if text in ("", "e"):
        return empty_node(alphabet)
    if alphabet > 10:
        raise ValueError("digit literals only supported for alphabets up to 10")
    try:
        letters = [int(ch) for ch in text]
    except ValueError:
        raise ValueError(f"bad node literal {text!r}") from None
    return node(alphabet, letters)


def format_node(nd: Node) -> str:
    if nd.alphabet > 10:
        raise ValueError("digit literals only supported for alphabets up to 10")
    if nd.is_empty:
        return "e"
    if nd.length > _MATERIALIZE_LIMIT:
        raise ScaleLimit("node too long for a digit literal")
    return "".join(str(l) * c for l, c in nd.runs)


def meet(s: Node, t: Node) -> Node:
    """Longest common prefix."""
    _check_alphabet(s, t)
    out: list[Run] = []
    length = 0
    for (al, ac), (bl, bc) in zip(s.runs, t.runs):
        if al != bl:
            break
        take = min(ac, bc)
        out.append((al, take))
        length += take
        if ac != bc:
            break
    return Node(s.alphabet, tuple(out), length)


def prec_compare(s: Node, t: Node) -> int:
    """The well order: by length, then lexicographically.  -1, 0, or 1."""
    _check_alphabet(s, t)
    if s.length != t.length:
        return -1 if s.length < t.length else 1
    i = j = 0
    ioff = joff = 0
    while i < len(s.runs) and j < len(t.runs):
        al, ac = s.runs[i]
        bl, bc = t.runs[j]
        if al != bl:
            return -1 if al < bl else 1
        step = min(ac - ioff, bc - joff)
        ioff += step
        joff += step
        if ioff == ac:
            i += 1
            ioff = 0
        if joff == bc:
            j += 1
            joff = 0
    return 0


def prec_sorted(nodes: Iterable[Node]) -> list[Node]:
    # No sort key exists for RLE words of unbounded length; compare directly.
    return sorted(nodes, key=functools.cmp_to_key(prec_compare))


def weight(s: Node) -> int:
    """Level value sum(n**(p-k) * s_k); equivalent tie-break to lexicographic."""
    n = s.alphabet
    total = 0
    pos = 0
    p = s.length
    for letter, count in s.runs:
        if letter:
            # letter * (n**(p-pos) + ... + n**(p-pos-count+1))
            lo = p - pos - count + 1
            total += letter * ((n ** (lo + count) - n**lo) // (n - 1) if n > 1 else count)
        pos += count
    return total


def first_move(t: Node, s: Node) -> int:
    """The letter i with t+i below s; requires t strictly below s."""
    if not t.strictly_below(s):
        raise NotBelow(f"{t!r} is not strictly below {s!r}")
    return s.letter_at(t.length)


@dataclass(frozen=True)
class RecordHistory:
    """Climb decomposition t = nodes[0] < ... < nodes[-1] = s.

    ``records[k]`` is the letter emitted at ``nodes[k]``: the strictly
    increasing sequence of new maximum letters met while climbing.
    """

    nodes: tuple[Node, ...]
    records: tuple[int, ...]

    def check(self) -> None:
        assert len(self.nodes) == len(self.records) + 1
        assert all(self.records[k] < self.records[k + 1] for k in range(len(self.records) - 1))
        s = self.nodes[-1]
        for k, rec in enumerate(self.records):
            t = self.nodes[k]
            assert t.strictly_below(s) and first_move(t, s) == rec
            seg = self.nodes[k + 1].suffix_after(t)
            assert max(l for l, _ in seg.runs) == rec


def record_history(t: Node, s: Node) -> RecordHistory:
    """Running-maximum records of the climb from t to s.

    Maxima restart at t: only letters of the suffix s minus t are scanned.
    """
    if not t.strictly_below(s):
        raise NotBelow(f"{t!r} is not strictly below {s!r}")
    w = s.suffix_after(t)
    nodes: list[Node] = []
    records: list[int] = []
    best = -1
    pos = 0
    for letter, count in w.runs:
        if letter > best:
            nodes.append(s.prefix(t.length + pos))
            records.append(letter)
            best = letter
        pos += count
    nodes.append(s)
    return RecordHistory(tuple(nodes), tuple(records))


@dataclass(frozen=True)
class NodeSet:
    """A finite set of nodes over one alphabet, with cached closures."""

    alphabet: int
    nodes: frozenset[Node]

    @staticmethod
    def of(alphabet: int, items: Iterable[Node | str]) -> "NodeSet":
        out = []
        for item in items:
            nd = parse_node(alphabet, item) if isinstance(item, str) else item
            if nd.alphabet != alphabet:
                raise AlphabetMismatch(f"node over {nd.alphabet} in set over {alphabet}")
            out.append(nd)
        return NodeSet(alphabet, frozenset(out))

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[Node]:
        return iter(self.sorted_nodes)

    def __contains__(self, nd: Node) -> bool:
        return nd in self.nodes

    @cached_property
    def sorted_nodes(self) -> tuple[Node, ...]:
        return tuple(prec_sorted(self.nodes))

    @cached_property
    def meet_closure_nodes(self) -> tuple[Node, ...]:
        # In a tree semilattice one pass of pairwise meets already closes.
        items = list(self.nodes)
        out = set(items)
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                out.add(meet(items[i], items[j]))
        return tuple(prec_sorted(out))

    @cached_property
    def record_closure_nodes(self) -> tuple[Node, ...]:
        cur = set(self.nodes)
        while True:
            items = prec_sorted(cur)
            new: set[Node] = set()
            for i in range(len(items)):
                for j in range(i + 1, len(items)):
                    m = meet(items[i], items[j])
                    if m not in cur:
                        new.add(m)
                    if items[i].strictly_below(items[j]):
                        for nd in record_history(items[i], items[j]).nodes[1:-1]:
                            if nd not in cur:
                                new.add(nd)
            if not new:
                return tuple(items)
            cur |= new

    def restrict_below(self, stem: Node) -> "NodeSet":
        return NodeSet(self.alphabet, frozenset(n for n in self.nodes if stem.is_prefix_of(n)))


def node_set(alphabet: int, items: Iterable[Node | str]) -> NodeSet:
    return NodeSet.of(alphabet, items)


def parse_node_set(alphabet: int, text: str) -> NodeSet:
    """Parse a literal like "{1,001,e}"."""
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"bad node set literal {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        return NodeSet(alphabet, frozenset())
    return NodeSet.of(alphabet, [part.strip() for part in inner.split(",")])


def format_node_set(ns: NodeSet) -> str:
    return "{" + ",".join(format_node(n) for n in ns.sorted_nodes) + "}"


def meet_closure(a: NodeSet) -> NodeSet:
    return NodeSet(a.alphabet, frozenset(a.meet_closure_nodes))


def record_closure(a: NodeSet) -> NodeSet:
    return NodeSet(a.alphabet, frozenset(a.record_closure_nodes))


# ---------------------------------------------------------------------------
# Structural equivalence
#
# A witness bijection between closures must preserve the well order, so it can
# only be the positional map between the prec-sorted closures.  Equivalence is
# therefore equality of structure tables: for every sorted pair, the closure
# index of the meet plus the first-move letters away from it, and for every
# closure element the flag saying whether it belongs to the underlying set.

StructureTable = tuple[int, tuple[tuple[int, int, int], ...], tuple[bool, ...]]


def _structure_table(closure: tuple[Node, ...], members: frozenset[Node]) -> StructureTable:
    index = {nd: k for k, nd in enumerate(closure)}
    rows: list[tuple[int, int, int]] = []
    for j in range(len(closure)):
        for i in range(j):
            m = meet(closure[i], closure[j])
            mi = index[m]
            u = -1 if m.length == closure[i].length else closure[i].letter_at(m.length)
            v = closure[j].letter_at(m.length)
            rows.append((mi, u, v))
    flags = tuple(nd in members for nd in closure)
    return (len(closure), tuple(rows), flags)


def first_move_table(a: NodeSet) -> StructureTable:
    """Structure table over the meet-closure; equal tables mean equivalent sets."""
    return _structure_table(a.meet_closure_nodes, a.nodes)


def record_table(a: NodeSet) -> StructureTable:
    """Structure table over the record-closure."""
    return _structure_table(a.record_closure_nodes, a.nodes)


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    mapping: Optional[tuple[tuple[Node, Node], ...]]  # closure bijection, sorted

    def __bool__(self) -> bool:
        return self.equivalent

    def as_dict(self) -> dict[Node, Node]:
        if self.mapping is None:
            raise ValueError("no witness: sets are not equivalent")
        return dict(self.mapping)


def _equivalent(a: NodeSet, b: NodeSet, closure_attr: str) -> EquivalenceResult:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch(f"alphabet {a.alphabet} vs {b.alphabet}")
    ca: tuple[Node, ...] = getattr(a, closure_attr)
    cb: tuple[Node, ...] = getattr(b, closure_attr)
    if len(ca) != len(cb):
        return EquivalenceResult(False, None)
    ta = _structure_table(ca, a.nodes)
    tb = _structure_table(cb, b.nodes)
    if ta != tb:
        return EquivalenceResult(False, None)
    return EquivalenceResult(True, tuple(zip(ca, cb)))


def first_move_equivalent(a: NodeSet, b: NodeSet) -> EquivalenceResult:
    """Decide equivalence over meet-closures (meets, order, first moves)."""
    return _equivalent(a, b, "meet_closure_nodes")


def record_equivalent(a: NodeSet, b: NodeSet) -> EquivalenceResult:
    """Decide equivalence over record-closures."""
    return _equivalent(a, b, "record_closure_nodes")


def replay_witness(a: NodeSet, b: NodeSet, result: EquivalenceResult, record: bool) -> bool:
    """Independently re-check a witness bijection: meets, order, first moves,
    and that it maps the one underlying set onto the other."""
    if not result.equivalent or result.mapping is None:
        return False
    f = dict(result.mapping)
    ca = [p for p, _ in result.mapping]
    closure = set(a.record_closure_nodes if record else a.meet_closure_nodes)
    if set(ca) != closure:
        return False
    if {f[x] for x in a.nodes} != set(b.nodes):
        return False
    for i, x in enumerate(ca):
        for y in ca[:i]:
            if f[meet(x, y)] != meet(f[x], f[y]):
                return False
            if prec_compare(x, y) != prec_compare(f[x], f[y]):
                return False
            lo, hi = (x, y) if x.strictly_below(y) else (y, x)
            if lo.strictly_below(hi):
                if first_move(lo, hi) != first_move(f[lo], f[hi]):
                    return False
                if record:
                    ha = record_history(lo, hi)
                    hb = record_history(f[lo], f[hi])
                    if ha.records != hb.records:
                        return False
                    if tuple(f[nd] for nd in ha.nodes) != hb.nodes:
                        return False
    return True


# ---------------------------------------------------------------------------
# Structure-preserving re-embedding (test support)


def reembed(a: NodeSet, rng: random.Random, record: bool = False, pad_max: int = 3) -> NodeSet:
    """Rebuild ``a`` with fresh padding, preserving its structure.

    The closure tree is replayed node by node in prec order: each node keeps
    its first-move letter away from its closure parent, gets random padding
    after it, and total lengths increase strictly so the well order survives.
    With ``record=True`` padding uses letter 0 only, which never creates a new
    running-maximum record, so record structure survives as well.
    """
    closure = a.record_closure_nodes if record else a.meet_closure_nodes
    images: dict[Node, Node] = {}
    prev_len = -1
    for j, nd in enumerate(closure):
        parent: Optional[Node] = None
        for cand in reversed(closure[:j]):
            if cand.strictly_below(nd):
                parent = cand
                break
        if parent is None:
            base = empty_node(a.alphabet)
            grow = rng.randint(0, pad_max)
            img = base
            for _ in range(grow):
                img = img.extend(0 if record else rng.randrange(a.alphabet))
        else:
            pimg = images[parent]
            img = pimg.extend(first_move(parent, nd))
        target = max(prev_len + 1, img.length) + rng.randint(0, pad_max)
        while img.length < target:
            img = img.extend(0 if record else rng.randrange(a.alphabet))
        images[nd] = img
        prev_len = img.length
    return NodeSet(a.alphabet, frozenset(images[x] for x in a.nodes))


def random_node_set(
    rng: random.Random, alphabet: int, size: int, max_len: int = 6
) -> NodeSet:
    """A random finite node set (for property tests)."""
    available = (
        max_len + 1
        if alphabet == 1
        else (alphabet ** (max_len + 1) - 1) // (alphabet - 1)
    )
    if size > available:
        raise ValueError(f"only {available} nodes of length <= {max_len} exist")
    out: set[Node] = set()
    while len(out) < size:
        length = rng.randint(0, max_len)
        out.add(node(alphabet, [rng.randrange(alphabet) for _ in range(length)]))
    return NodeSet(alphabet, frozenset(out))
