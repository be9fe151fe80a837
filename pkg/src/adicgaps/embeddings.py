"""Injective tree maps and their oracle-computed actions on combs and types.

Two families of maps are built here.  Substitution embeddings replace each
letter with a fixed block (the letter-doubling map psi is the canonical one).
Tabulated embeddings are lazily-filled tables over all words up to a domain
depth, produced by two constructions: the anchored realization of an e-family
(each tree edge routes through the corresponding branch word, with a 0-pad
after each block whose length follows a strictly order-increasing schedule,
so images are injective and order-monotone by length alone), and the
domination construction (route every word through a tooth of a fixed witness
family of the dominating type, indexed by the word's stem, again with padding
lengths from the same kind of schedule).

Actions on comb kinds and types are never derived symbolically: a canonical
witness is mapped through the embedding and the image is classified, at two
sizes, and a disagreement is reported as instability rather than guessed
away.  Probe budgets bound witness sizes, domain depth, and the run count of
materialized teeth; skipped probes are reported, not silently dropped.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Optional

from .combs import (
    CombKind,
    EFamily,
    InducedCombMap,
    NotHomogeneous,
    classify_comb,
    comb_witness,
    efamily_induced_map,
)
from .tree import (
    Node,
    NodeSet,
    ScaleLimit,
    empty_node,
    first_move_equivalent,
    node_from_runs,
    prec_compare,
    reembed,
    weight,
)
from .types import (
    AmbiguousTruncation,
    TypeDescriptor,
    classify_type,
    enumerate_types,
    print_type,
    type_witness,
    witness_spec,
)


class ValidationFailure(ValueError):
    """An embedding failed its structural or oracle validation."""


class UnstableAction(RuntimeError):
    """Witness images classify differently at two probe sizes."""


class OutOfDomain(ValueError):
    """A node beyond the embedding's domain capability."""


@dataclass(frozen=True)
class ProbeBudget:
    """Knobs bounding every probing operation; recorded in reports."""

    comb_blocks: int = 4
    type_blocks: int = 4
    domain_depth: int = 64
    replay_samples: int = 20
    replay_depth: int = 6
    run_limit: int = 20_000  # largest materialized tooth, in RLE runs

    def as_json(self) -> dict:
        return {
            "comb_blocks": self.comb_blocks,
            "type_blocks": self.type_blocks,
            "domain_depth": self.domain_depth,
            "replay_samples": self.replay_samples,
            "replay_depth": self.replay_depth,
            "run_limit": self.run_limit,
        }


DEFAULT_BUDGET = ProbeBudget()


def _node_json(nd: Node) -> list:
    return [[letter, count] for letter, count in nd.runs]


def _node_from_json(alphabet: int, data: list) -> Node:
    return node_from_runs(alphabet, [(l, c) for l, c in data])


# ---------------------------------------------------------------------------
# substitution embeddings


def _uniquely_decodable(blocks: tuple[tuple[int, ...], ...]) -> bool:
    """Sardinas-Patterson: block concatenation is injective on sequences."""
    code = set(blocks)
    if len(code) != len(blocks) or any(not b for b in blocks):
        return False

    def suffixes(a, b):  # dangling suffix of b after a, if a is a prefix
        if len(a) <= len(b) and b[: len(a)] == a:
            return b[len(a):]
        return None

    pending = set()
    for a in code:
        for b in code:
            if a != b:
                s = suffixes(a, b)
                if s == ():
                    return False
                if s is not None:
                    pending.add(s)
    seen = set(pending)
    while pending:
        nxt = set()
        for d in pending:
            for c in code:
                for s in (suffixes(d, c), suffixes(c, d)):
                    if s == ():
                        return False
                    if s is not None and s not in seen:
                        nxt.add(s)
        seen |= nxt
        pending = nxt
    return True


@dataclass(frozen=True)
class SubstitutionEmbedding:
    """phi(empty) = root, phi(s + i) = phi(s) + blocks[i]."""

    root: Node
    blocks: tuple[Node, ...]

    def __post_init__(self) -> None:
        if not self.blocks:
            raise ValueError("need at least one block")
        m = self.root.alphabet
        for b in self.blocks:
            if b.alphabet != m:
                raise ValueError("blocks and root must share an alphabet")
            if b.is_empty:
                raise ValueError("blocks must be nonempty")

    @property
    def domain_alphabet(self) -> int:
        return len(self.blocks)

    @property
    def codomain_alphabet(self) -> int:
        return self.root.alphabet

    @cached_property
    def injective(self) -> bool:
        try:
            tuples = tuple(b.letters for b in self.blocks)
        except ScaleLimit:
            return len(set(self.blocks)) == len(self.blocks)  # giant blocks: runs differ
        return _uniquely_decodable(tuples)

    def map_node(self, s: Node) -> Node:
        if s.alphabet != self.domain_alphabet:
            raise OutOfDomain(f"word over {s.alphabet} fed to arity {self.domain_alphabet}")
        out = self.root
        for letter, count in s.runs:
            out = out.concat(self.blocks[letter].repeat(count))
        return out

    def to_json(self) -> dict:
        return {
            "kind": "substitution",
            "alphabet": self.codomain_alphabet,
            "root": _node_json(self.root),
            "blocks": [_node_json(b) for b in self.blocks],
        }

    @staticmethod
    def from_json(data: dict) -> "SubstitutionEmbedding":
        m = data["alphabet"]
        return SubstitutionEmbedding(
            _node_from_json(m, data["root"]),
            tuple(_node_from_json(m, b) for b in data["blocks"]),
        )


def relabel_embedding(iota: Iterable[int], alphabet_out: int) -> SubstitutionEmbedding:
    """Single-letter blocks: the word map of a letter injection."""
    blocks = tuple(
        node_from_runs(alphabet_out, [(letter, 1)]) for letter in iota
    )
    return SubstitutionEmbedding(empty_node(alphabet_out), blocks)


def psi_map(n: int) -> SubstitutionEmbedding:
    """(s0, s1, ..., sk) -> (s0, n-1, s1, n-1, ..., sk, n-1)."""
    blocks = tuple(
        node_from_runs(n, [(i, 1), (n - 1, 1)]) if i != n - 1 else node_from_runs(n, [(n - 1, 2)])
        for i in range(n)
    )
    return SubstitutionEmbedding(empty_node(n), blocks)


# ---------------------------------------------------------------------------
# tabulated embeddings


class TabulatedEmbedding:
    """An explicit injective map on words up to a domain depth.

    The table is filled on demand from a generator function, so astronomical
    domains stay cheap: only probed words are materialized.  Serialization
    carries the materialized pairs.
    """

    def __init__(
        self,
        domain_alphabet: int,
        codomain_alphabet: int,
        depth: int,
        fn: Optional[Callable[[Node], Node]] = None,
        pairs: Optional[Iterable[tuple[Node, Node]]] = None,
        label: str = "tabulated",
    ) -> None:
        self.domain_alphabet = domain_alphabet
        self.codomain_alphabet = codomain_alphabet
        self.depth = depth
        self.label = label
        self._fn = fn
        self._table: dict[Node, Node] = dict(pairs or ())

    def map_node(self, s: Node) -> Node:
        if s.alphabet != self.domain_alphabet:
            raise OutOfDomain(f"word over {s.alphabet} fed to arity {self.domain_alphabet}")
        if s.length > self.depth:
            raise OutOfDomain(f"word of length {s.length} beyond depth {self.depth}")
        hit = self._table.get(s)
        if hit is None:
            if self._fn is None:
                raise OutOfDomain("word not present in the finite table")
            hit = self._fn(s)
            self._table[s] = hit
        return hit

    def materialized_pairs(self) -> list[tuple[Node, Node]]:
        from .tree import prec_sorted

        return [(s, self._table[s]) for s in prec_sorted(self._table)]

    def to_json(self) -> dict:
        return {
            "kind": "tabulated",
            "label": self.label,
            "domain_alphabet": self.domain_alphabet,
            "codomain_alphabet": self.codomain_alphabet,
            "depth": self.depth,
            "pairs": [
                [_node_json(s), _node_json(t)] for s, t in self.materialized_pairs()
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "TabulatedEmbedding":
        n, m = data["domain_alphabet"], data["codomain_alphabet"]
        pairs = [
            (_node_from_json(n, a), _node_from_json(m, b)) for a, b in data["pairs"]
        ]
        return TabulatedEmbedding(
            n, m, data["depth"], pairs=pairs, label=data.get("label", "tabulated")
        )


Embedding = SubstitutionEmbedding | TabulatedEmbedding


def embedding_from_json(data: dict) -> Embedding:
    if data.get("kind") == "substitution":
        return SubstitutionEmbedding.from_json(data)
    if data.get("kind") == "tabulated":
        return TabulatedEmbedding.from_json(data)
    raise ValueError(f"unknown embedding kind {data.get('kind')!r}")


def apply(phi: Embedding, a: NodeSet) -> NodeSet:
    """Elementwise image of a node set."""
    return NodeSet(
        phi.codomain_alphabet, frozenset(phi.map_node(s) for s in a.sorted_nodes)
    )


# ---------------------------------------------------------------------------
# oracle actions


def _classify_comb_image(phi: Embedding, kind: CombKind, count: int) -> CombKind:
    image = apply(phi, comb_witness(kind, count, phi.domain_alphabet))
    if len(image) != count:
        raise ValidationFailure(f"witness of {kind} collapsed under {phi}")
    return classify_comb(image)


def comb_action_partial(
    phi: Embedding, budget: ProbeBudget = DEFAULT_BUDGET
) -> tuple[dict[tuple[int, int], Optional[tuple[int, int]]], dict[tuple[int, int], str]]:
    """Map each comb kind's witness through phi and classify the image, at
    two sizes.  Kinds whose images do not classify, or classify differently
    at the two sizes, get None plus a reason.  Chain images always classify;
    comb images need not (a block longer than twice the spine block pushes
    teeth past the next branch point, and no comb witness looks like that).
    """
    n = phi.domain_alphabet
    table: dict[tuple[int, int], Optional[tuple[int, int]]] = {}
    reasons: dict[tuple[int, int], str] = {}
    for i in range(n):
        for j in range(n):
            kind = CombKind(i, j)
            try:
                first = _classify_comb_image(phi, kind, budget.comb_blocks)
                second = _classify_comb_image(phi, kind, budget.comb_blocks + 1)
            except (NotHomogeneous, ScaleLimit, OutOfDomain) as ex:
                table[(i, j)] = None
                reasons[(i, j)] = f"{type(ex).__name__}: {ex}"
                continue
            if first != second:
                table[(i, j)] = None
                reasons[(i, j)] = (
                    f"unstable: {first} at {budget.comb_blocks} blocks, "
                    f"{second} at {budget.comb_blocks + 1}"
                )
            else:
                table[(i, j)] = (first.spine, first.teeth)
    return table, reasons


def comb_action(phi: Embedding, budget: ProbeBudget = DEFAULT_BUDGET) -> InducedCombMap:
    """Total comb action; raises if any kind is unstable or unclassifiable."""
    table, reasons = comb_action_partial(phi, budget)
    for key, reason in reasons.items():
        if reason.startswith("unstable"):
            raise UnstableAction(f"{key[0]}>{key[1]} {reason}")
        raise NotHomogeneous(f"image of {key[0]}>{key[1]} witness: {reason}")
    return InducedCombMap.from_function(
        phi.domain_alphabet, phi.codomain_alphabet, lambda i, j: table[(i, j)]
    )


@dataclass(frozen=True)
class TypeActionReport:
    """Oracle action on types: stable values, plus everything that was not."""

    mapping: tuple[tuple[TypeDescriptor, TypeDescriptor], ...]
    unstable: tuple[tuple[TypeDescriptor, str], ...]
    unverified: tuple[tuple[TypeDescriptor, TypeDescriptor], ...]  # no second probe fit
    skipped: tuple[TypeDescriptor, ...]
    budget: ProbeBudget

    def as_dict(self) -> dict[TypeDescriptor, TypeDescriptor]:
        return dict(self.mapping)

    def probed(self) -> dict[TypeDescriptor, TypeDescriptor]:
        """Stable and unverified values together: everything with a reading."""
        out = dict(self.mapping)
        out.update(dict(self.unverified))
        return out

    def as_json(self) -> dict:
        return {
            "mapping": {print_type(a): print_type(b) for a, b in self.mapping},
            "unstable": {print_type(t): why for t, why in self.unstable},
            "unverified": {print_type(a): print_type(b) for a, b in self.unverified},
            "skipped": [print_type(t) for t in self.skipped],
            "budget": self.budget.as_json(),
        }


def _classify_type_image(phi: Embedding, tau: TypeDescriptor, blocks: int) -> TypeDescriptor:
    witness = type_witness(tau, blocks)
    if max(x.length for x in witness.nodes) > budget_depth(phi):
        raise OutOfDomain(f"witness of {print_type(tau)} exceeds domain depth")
    image = apply(phi, witness)
    if len(image) != blocks:
        raise ValidationFailure(f"witness of {print_type(tau)} collapsed")
    return classify_type(image)


def budget_depth(phi: Embedding) -> int:
    return phi.depth if isinstance(phi, TabulatedEmbedding) else 10**6


def type_action(phi: Embedding, budget: ProbeBudget = DEFAULT_BUDGET) -> TypeActionReport:
    mapping, unstable, unverified, skipped = [], [], [], []
    for tau in enumerate_types(phi.domain_alphabet):
        try:
            first = _classify_type_image(phi, tau, budget.type_blocks)
        except (ScaleLimit, OutOfDomain):
            skipped.append(tau)
            continue
        except (NotHomogeneous, AmbiguousTruncation) as ex:
            unstable.append((tau, f"image not classifiable: {ex}"))
            continue
        try:
            second = _classify_type_image(phi, tau, budget.type_blocks + 1)
        except (ScaleLimit, OutOfDomain):
            unverified.append((tau, first))
            continue
        except (NotHomogeneous, AmbiguousTruncation) as ex:
            unstable.append((tau, f"follow-up probe not classifiable: {ex}"))
            continue
        if first != second:
            unstable.append(
                (tau, f"{print_type(first)} at {budget.type_blocks} blocks, "
                      f"{print_type(second)} at {budget.type_blocks + 1}")
            )
        else:
            mapping.append((tau, first))
    return TypeActionReport(
        tuple(mapping), tuple(unstable), tuple(unverified), tuple(skipped), budget
    )


# ---------------------------------------------------------------------------
# structural replay


@dataclass(frozen=True)
class ReplayReport:
    samples: int
    checked_pairs: int
    violations: tuple[str, ...]


def structural_replay(
    phi: Embedding,
    rng: random.Random,
    budget: ProbeBudget = DEFAULT_BUDGET,
    sample_sets: Optional[Iterable[NodeSet]] = None,
) -> ReplayReport:
    """Replay the structural conditions on sampled sets: injectivity, order
    monotonicity, and preservation of first-move equivalence.

    Images of meets are not compared with meets of images: that pointwise law
    fails even for correct constructions (anchors extend past the image of
    the shorter word).  What the equivalence layer actually needs is exactly
    what is replayed here.

    ``sample_sets`` overrides the random samples; stem-routed maps preserve
    length order only on sets whose stems follow the word order, so they are
    replayed on witness-shaped samples rather than arbitrary ones.
    """
    from .tree import random_node_set

    violations = []
    checked = 0
    n = phi.domain_alphabet
    if sample_sets is None:
        samples = [
            random_node_set(rng, n, rng.randint(2, 5), max_len=budget.replay_depth)
            for _ in range(budget.replay_samples)
        ]
    else:
        samples = list(sample_sets)
    for k, a in enumerate(samples):
        images = {s: phi.map_node(s) for s in a.sorted_nodes}
        items = list(images)
        for i, s in enumerate(items):
            for t in items[:i]:
                checked += 1
                if images[s] == images[t]:
                    violations.append(f"collision: {s!r} and {t!r}")
                if prec_compare(s, t) != prec_compare(images[s], images[t]):
                    violations.append(f"order flip: {s!r} vs {t!r}")
        if sample_sets is None:
            b = reembed(a, rng)
            if first_move_equivalent(a, b):
                if not first_move_equivalent(apply(phi, a), apply(phi, b)):
                    violations.append(f"equivalence lost on sample {k}")
    report = ReplayReport(len(samples), checked, tuple(violations))
    if violations:
        raise ValidationFailure("; ".join(violations[:3]))
    return report


# ---------------------------------------------------------------------------
# anchored realization of an e-family


def realize_efamily(
    fam: EFamily,
    depth: int = DEFAULT_BUDGET.domain_depth,
    validate: bool = True,
    budget: ProbeBudget = DEFAULT_BUDGET,
) -> TabulatedEmbedding:
    """The tree map a branch-word family encodes.

    Each edge s -> s+i appends e(i) and then a 0-pad; each word's image is
    its anchor followed by e(inf).  Pad lengths follow the schedule
    T(s) = K * ((n+1)**(2|s|+2) + weight(s)), which is strictly increasing in
    the well order, so images have strictly increasing lengths: injectivity
    and order monotonicity come from lengths alone.  When e(inf) lies below
    e(i) the image of s sits on the path into s's subtree images, which is
    what makes chain images chains in the degenerate case.
    """
    n, m = fam.n, fam.alphabet_out
    block_len = fam.e[0].length
    K = max(block_len, fam.e_inf.length, 1)

    def T(s: Node) -> int:
        return K * ((n + 1) ** (2 * s.length + 2) + weight(s))

    anchors: dict[Node, Node] = {empty_node(n): empty_node(m)}

    def anchor(s: Node) -> Node:
        hit = anchors.get(s)
        if hit is not None:
            return hit
        parent = s.prefix(s.length - 1)
        letter = s.letter_at(s.length - 1)
        pad = T(s) - T(parent) - block_len
        assert pad >= 0
        out = anchor(parent).concat(fam.e[letter]).extend(0, pad) if pad else \
            anchor(parent).concat(fam.e[letter])
        anchors[s] = out
        return out

    def fn(s: Node) -> Node:
        return anchor(s).concat(fam.e_inf)

    phi = TabulatedEmbedding(n, m, depth, fn=fn, label="efamily")
    if validate:
        expected = efamily_induced_map(fam)
        got = comb_action(phi, budget)
        if got != expected:
            for (key, want), (_, have) in zip(expected.table, got.table):
                if want != have:
                    raise ValidationFailure(
                        f"comb action mismatch at {key[0]}>{key[1]}: "
                        f"rule says {want[0]}>{want[1]}, oracle says {have[0]}>{have[1]}"
                    )
    return phi


# ---------------------------------------------------------------------------
# the domination construction


def _stem(t: Node) -> Node:
    """t without its trailing 0-run."""
    runs = t.runs
    if runs and runs[-1][0] == 0:
        runs = runs[:-1]
    return node_from_runs(t.alphabet, runs)


def _stem_index(stem: Node) -> int:
    """Position of the stem in the well-ordered list of all stems.

    Stems are words not ending in 0 (plus the empty word); for length p >= 1
    there are (n-1) * n**(p-1) of them, ordered by length then value.
    """
    if stem.is_empty:
        return 0
    n = stem.alphabet
    p = stem.length
    before = 1 + sum((n - 1) * n ** (q - 1) for q in range(1, p))
    head = stem.prefix(p - 1)
    value = 0
    pos = 0
    for letter, count in head.runs:
        if letter:
            lo = p - 2 - pos - count + 1
            value += letter * ((n ** (lo + count) - n**lo) // (n - 1) if n > 1 else count)
        pos += count
    last = stem.letter_at(p - 1)
    return before + value * (n - 1) + (last - 1)


def domination_embedding(
    tau0: TypeDescriptor,
    tau1: TypeDescriptor,
    depth: int = DEFAULT_BUDGET.domain_depth,
    run_limit: int = DEFAULT_BUDGET.run_limit,
) -> TabulatedEmbedding:
    """Route every word through a tooth of tau1's witness family.

    phi(t) = u1**(N * step) + v1 + u0**(z + 1), where N is the index of t's
    stem (t minus its trailing 0-run) among all stems in the well order and
    z is the length of that trailing 0-run.  Words differing only in
    trailing 0s share a tooth, so 0-chains climb a single tooth by u0-blocks
    and land in tau0's class; sets with distinct stems spread over distinct
    teeth and inherit tau1's record pattern.

    The spacing ``step`` is sized so each tooth's whole pad range fits
    strictly before the next tooth's branch point.  That keeps every image
    of a canonical witness interleaved with the spine exactly the way the
    target type's own witness is, which is what the positional table
    comparison needs; images are injective outright because image lengths
    determine the stem window and the pad count.  Length order is preserved
    on every set whose stem order agrees with its word order -- canonical
    witnesses and chains all do.  It cannot be preserved everywhere: 01
    comes before 10 in the well order, but their stems 01 and 1 compare the
    other way, and any stem-routed map inherits that flip.

    tau0 must be a pure lower-row type (its witness block is the pad block;
    an upper row would need teeth of its own).  tau1 is arbitrary: the
    interesting cases are dominating top-combs, but the construction itself
    does not require domination, and running it with a non-top-comb is how
    the mixed-output behavior is observed.

    Teeth for deep stems need index-many repetitions of u1; a tooth whose
    run count would exceed ``run_limit`` raises ScaleLimit, which probing
    reports as a skip.
    """
    if tau0.alphabet != tau1.alphabet:
        raise ValueError("types must share an alphabet")
    if tau0.tau1:
        raise ValueError("the padding type must be pure lower-row")
    n = tau0.alphabet
    spec0, spec1 = witness_spec(tau0), witness_spec(tau1)
    u0 = spec0.u
    u1, v1 = spec1.u, spec1.v
    step = (v1.length + (depth + 1) * u0.length) // u1.length + 2

    def tooth(index: int) -> Node:
        if index * step * len(u1.runs) + len(v1.runs) > run_limit:
            raise ScaleLimit(f"tooth {index} exceeds {run_limit} runs")
        return u1.repeat(index * step).concat(v1)

    def fn(t: Node) -> Node:
        x = tooth(_stem_index(_stem(t)))
        z = t.runs[-1][1] if t.runs and t.runs[-1][0] == 0 else 0
        return x.concat(u0.repeat(z + 1))

    return TabulatedEmbedding(n, n, depth, fn=fn, label="domination")


# ---------------------------------------------------------------------------
# max-monotonicity


@dataclass(frozen=True)
class MaxMonotonicityReport:
    violations: tuple[str, ...]
    checked_pairs: int
    action: TypeActionReport

    @property
    def ok(self) -> bool:
        return not self.violations


def max_monotonicity_check(
    phi: Embedding, budget: ProbeBudget = DEFAULT_BUDGET
) -> MaxMonotonicityReport:
    """Over stable probed pairs: max(tau) <= max(sigma) must push through."""
    from .types import max_of

    action = type_action(phi, budget)
    table = action.as_dict()
    items = list(table.items())
    violations = []
    checked = 0
    for tau, out_tau in items:
        for sigma, out_sigma in items:
            checked += 1
            if max_of(tau) <= max_of(sigma) and max_of(out_tau) > max_of(out_sigma):
                violations.append(
                    f"max({print_type(tau)})<=max({print_type(sigma)}) but "
                    f"max({print_type(out_tau)})>max({print_type(out_sigma)})"
                )
    return MaxMonotonicityReport(tuple(violations), checked, action)
