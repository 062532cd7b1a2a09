"""Core data model: dependency trees linked to word-order domain structures.

A sentence is represented on two layers.  The first layer is a rooted
dependency tree over the words, with one typed edge per non-root word; the
tree may be non-projective.  The second layer is a hierarchy of *order
domains*: contiguous spans of words that carry all ordering information.

The layers are linked by insertion.  Every word realizes the domain
sequence of its lexical entry (its template) and sits inside exactly one
domain of that sequence, the self domain.  The whole realized sequence is
then nested inside one domain introduced by the word's *positional head*:
a transitive head in the tree, which coincides with the direct head unless
the word has been extracted upwards.  The sentence root nests inside an
implicit top domain spanning all words, introduced by an implicit ROOT
governor that never surfaces.

Member sets of domains are derived from insertion: a domain contains its
introducing word (if it is the self slot) plus every word nested under the
insertions it hosts.  Validators below check the stored sets against this
derivation, along with the four linking conditions:

  1. each word lies in exactly one domain of its own sequence,
  2. the domains of one word's sequence are pairwise disjoint,
  3. each non-root word lies in at least two domains, one of them
     belonging to the sequence of a transitive head,
  4. the left-to-right order of each sequence is consistent with surface
     precedence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Iterator

if TYPE_CHECKING:
    from .lexicon import LexicalEntry, Lexicon

TOP_DOMAIN_ID = "top"


class StructureError(Exception):
    """A structure is too malformed for the requested operation."""


class UnknownTokenError(Exception):
    """A surface token has no entry in the lexicon."""

    def __init__(self, token: str):
        super().__init__(f"unknown token {token!r}")
        self.token = token


class ResourceLimitError(Exception):
    """The search exceeded its candidate budget; results were not truncated."""


class TokenLimitError(Exception):
    """Input is longer than the exhaustive enumeration is willing to take."""


class OrderInconsistencyError(StructureError):
    """Surface order contradicts the domain layer (contiguity or sequence order)."""

    def __init__(self, report: "ValidationReport"):
        super().__init__("; ".join(v.message for v in report.violations))
        self.report = report


@dataclass(frozen=True)
class Violation:
    """One validator finding: a condition id, the offending indices, a message."""

    condition: str
    subjects: tuple
    message: str

    def render(self) -> str:
        subj = ",".join(str(s) for s in self.subjects)
        return f"{self.condition} [{subj}]: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    """Ordered list of violations; empty means the checked object is valid."""

    violations: tuple[Violation, ...]

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(self.violations))

    @property
    def ok(self) -> bool:
        return not self.violations

    def conditions(self) -> set[str]:
        return {v.condition for v in self.violations}

    def by_condition(self, condition: str) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.condition == condition)

    def render(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(v.render() for v in self.violations)


@dataclass(frozen=True)
class WordToken:
    """A word occurrence: surface position, form, and the lexical entry chosen for it."""

    index: int
    form: str
    entry: "LexicalEntry"


@dataclass(frozen=True)
class DependencyEdge:
    head: int
    dependent: int
    dtype: str


# Per word index: flat attribute -> value map (the word's morphosyntactic features).
FeatureMap = dict[int, dict[str, str]]


@dataclass(frozen=True)
class DependencyTree:
    """Rooted tree of typed dependencies over the words of one sentence.

    Words are kept sorted by index and edges by dependent, so that two
    trees with the same content compare equal regardless of construction
    order.  Projectivity is not required here; discontinuity is constrained
    on the domain layer instead.
    """

    words: tuple[WordToken, ...]
    root: int
    edges: tuple[DependencyEdge, ...]
    classes: dict[int, str]

    def __post_init__(self):
        object.__setattr__(
            self, "words", tuple(sorted(self.words, key=lambda w: w.index))
        )
        object.__setattr__(
            self,
            "edges",
            tuple(sorted(self.edges, key=lambda e: (e.dependent, e.head, e.dtype))),
        )

    @property
    def n(self) -> int:
        return len(self.words)

    def forms(self) -> tuple[str, ...]:
        return tuple(w.form for w in self.words)

    def head_of(self) -> dict[int, int]:
        return {e.dependent: e.head for e in self.edges}

    def dtype_of(self) -> dict[int, str]:
        return {e.dependent: e.dtype for e in self.edges}


@dataclass(frozen=True)
class OrderDomain:
    """A named contiguous set of word indices."""

    id: str
    members: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))

    def span(self) -> tuple[int, int]:
        return (min(self.members), max(self.members))

    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))


@dataclass(frozen=True)
class OrderDomainStructure:
    """All realized domains of a sentence plus each word's domain sequence.

    ``assoc`` maps a word index to one slot per position of its entry's
    template, holding the id of the realized domain or None where the slot
    stayed empty.  The top domain appears in ``domains`` but in no word's
    sequence; it belongs to the implicit ROOT governor.
    """

    domains: tuple[OrderDomain, ...]
    assoc: dict[int, tuple[str | None, ...]]

    def __post_init__(self):
        object.__setattr__(
            self, "domains", tuple(sorted(self.domains, key=lambda d: d.id))
        )
        object.__setattr__(
            self, "assoc", {w: tuple(seq) for w, seq in sorted(self.assoc.items())}
        )

    def by_id(self) -> dict[str, OrderDomain]:
        return {d.id: d for d in self.domains}

    def realized(self, word: int) -> tuple[str, ...]:
        return tuple(d for d in self.assoc[word] if d is not None)


@dataclass(frozen=True)
class DependencyStructure:
    """A tree, its feature maps, the domain layer, and the positional-head map.

    ``positional`` maps every non-root word to the transitive head whose
    domain hosts it.  The root is hosted by the implicit top domain and has
    no entry here.
    """

    tree: DependencyTree
    features: FeatureMap
    domains: OrderDomainStructure
    positional: dict[int, int]

    def __post_init__(self):
        object.__setattr__(
            self, "features", {w: dict(fs) for w, fs in sorted(self.features.items())}
        )
        object.__setattr__(self, "positional", dict(sorted(self.positional.items())))


# ---------------------------------------------------------------------------
# tree validation


def iter_tree_violations(
    tree: DependencyTree, lex: "Lexicon | None" = None
) -> Iterator[Violation]:
    if not tree.words:
        yield Violation("tree.empty", (), "tree has no words")
        return
    n = len(tree.words)
    indices = [w.index for w in tree.words]
    if indices != list(range(n)):
        yield Violation(
            "tree.index",
            tuple(indices),
            f"word indices must form the range 0..{n - 1}",
        )
        return
    if not 0 <= tree.root < n:
        yield Violation("tree.root-range", (tree.root,), "root index out of range")
        return

    dtypes = lex.dtype_set() if lex is not None else None
    classes = lex.class_set() if lex is not None else None
    for w in tree.words:
        cls = tree.classes.get(w.index)
        if cls is None:
            yield Violation(
                "tree.class-missing", (w.index,), f"word {w.index} has no class"
            )
        elif classes is not None and cls not in classes:
            yield Violation(
                "tree.class-inventory",
                (w.index, cls),
                f"class {cls!r} is not declared",
            )

    incoming: dict[int, list[DependencyEdge]] = {w.index: [] for w in tree.words}
    structural = False
    for e in tree.edges:
        if not (0 <= e.head < n and 0 <= e.dependent < n):
            yield Violation(
                "tree.edge-range",
                (e.head, e.dependent),
                f"edge {e.head}-{e.dtype}->{e.dependent} leaves the word range",
            )
            structural = True
            continue
        if e.head == e.dependent:
            yield Violation(
                "tree.self-edge", (e.head,), f"word {e.head} governs itself"
            )
            structural = True
            continue
        if dtypes is not None and e.dtype not in dtypes:
            yield Violation(
                "tree.dtype-inventory",
                (e.head, e.dependent, e.dtype),
                f"dependency type {e.dtype!r} is not declared",
            )
        incoming[e.dependent].append(e)

    for w in tree.words:
        edges_in = incoming[w.index]
        if w.index == tree.root:
            if edges_in:
                yield Violation(
                    "tree.root-head",
                    (w.index,),
                    "the root must not have an incoming edge",
                )
                structural = True
        elif not edges_in:
            yield Violation(
                "tree.no-head", (w.index,), f"word {w.index} has no head"
            )
            structural = True
        elif len(edges_in) > 1:
            yield Violation(
                "tree.multi-head",
                (w.index,),
                f"word {w.index} has {len(edges_in)} heads",
            )
            structural = True

    if structural:
        return
    head_of = tree.head_of()
    for w in tree.words:
        seen = {w.index}
        cur = w.index
        while cur != tree.root:
            cur = head_of[cur]
            if cur in seen:
                yield Violation(
                    "tree.cycle", tuple(sorted(seen)), "dependency cycle detected"
                )
                return
            seen.add(cur)


def validate_tree(tree: DependencyTree, lex: "Lexicon | None" = None) -> ValidationReport:
    """Check rootedness, single-headedness, acyclicity, and symbol inventories."""
    return ValidationReport(tuple(iter_tree_violations(tree, lex)))


# ---------------------------------------------------------------------------
# order domain structure validation


def iter_ods_violations(
    ods: OrderDomainStructure, n_words: int
) -> Iterator[Violation]:
    seen_ids: set[str] = set()
    for d in ods.domains:
        if d.id in seen_ids:
            yield Violation("ods.dup-id", (d.id,), f"duplicate domain id {d.id!r}")
        seen_ids.add(d.id)
        if not d.members:
            yield Violation("ods.empty", (d.id,), f"domain {d.id!r} has no members")
            continue
        bad = [m for m in d.members if not 0 <= m < n_words]
        if bad:
            yield Violation(
                "ods.range",
                (d.id, *sorted(bad)),
                f"domain {d.id!r} contains out-of-range indices",
            )
            continue
        lo, hi = d.span()
        if len(d.members) != hi - lo + 1:
            yield Violation(
                "ods.contiguity",
                (d.id,),
                f"domain {d.id!r} is not contiguous: {sorted(d.members)}",
            )

    # Any two domains must be nested or disjoint.
    domains = ods.domains
    for i in range(len(domains)):
        for j in range(i + 1, len(domains)):
            a, b = domains[i].members, domains[j].members
            if a & b and not (a <= b or b <= a):
                yield Violation(
                    "ods.hierarchy",
                    (domains[i].id, domains[j].id),
                    f"domains {domains[i].id!r} and {domains[j].id!r} overlap "
                    "without nesting",
                )

    full = frozenset(range(n_words))
    if n_words and not any(d.members == full for d in ods.domains):
        yield Violation(
            "ods.top", (), "no domain spans the whole sentence (top element missing)"
        )

    by_id = ods.by_id()
    for w, seq in ods.assoc.items():
        if not 0 <= w < n_words:
            yield Violation(
                "ods.assoc-range", (w,), f"sequence given for unknown word {w}"
            )
        for did in seq:
            if did is not None and did not in by_id:
                yield Violation(
                    "ods.assoc-unknown",
                    (w, did),
                    f"sequence of word {w} names unknown domain {did!r}",
                )


def validate_domain_structure(
    ods: OrderDomainStructure, n_words: int
) -> ValidationReport:
    """Check contiguity, pairwise nesting or disjointness, and the top element."""
    return ValidationReport(tuple(iter_ods_violations(ods, n_words)))


# ---------------------------------------------------------------------------
# navigation

# Immediate members of a domain are addressed as ("w", word_index) for the
# introducing word itself and ("d", domain_id) for a maximal sub-domain.
Member = tuple[str, int | str]


class StructureIndex:
    """Precomputed navigation over one dependency structure.

    Builds the insertion relation (which domain hosts each word), the
    resulting tree of domains, and per-domain immediate member lists in
    surface order.  Requires both layers to be individually valid and the
    linking to be well defined; raises StructureError otherwise.
    """

    def __init__(self, ds: DependencyStructure):
        self.ds = ds
        tree = ds.tree
        self.n = tree.n
        self.head_of = tree.head_of()
        self.dtype_of = tree.dtype_of()
        self.by_id = ds.domains.by_id()

        self.owner: dict[str, tuple[int, int]] = {}
        for w, seq in ds.domains.assoc.items():
            for slot, did in enumerate(seq):
                if did is None:
                    continue
                if did in self.owner:
                    raise StructureError(f"domain {did!r} owned by two sequences")
                self.owner[did] = (w, slot)

        unowned = [d.id for d in ds.domains.domains if d.id not in self.owner]
        if len(unowned) != 1:
            raise StructureError(
                f"expected exactly one top domain, found {unowned!r}"
            )
        self.top_id = unowned[0]

        self.insertion: dict[int, str] = {tree.root: self.top_id}
        for w in range(self.n):
            if w == tree.root:
                continue
            p = ds.positional.get(w)
            if p is None:
                raise StructureError(f"word {w} has no positional head")
            hosts = [
                did
                for did in ds.domains.assoc.get(p, ())
                if did is not None and w in self.by_id[did].members
            ]
            if len(hosts) != 1:
                raise StructureError(
                    f"word {w} must lie in exactly one domain of word {p}'s "
                    f"sequence, found {len(hosts)}"
                )
            self.insertion[w] = hosts[0]

        children: dict[str, list[str]] = {d.id: [] for d in ds.domains.domains}
        for w in range(self.n):
            target = self.insertion[w]
            for did in ds.domains.realized(w):
                children[target].append(did)
        self.domain_children = {
            did: tuple(sorted(kids, key=lambda k: min(self.by_id[k].members)))
            for did, kids in children.items()
        }

    def ancestors(self, w: int) -> tuple[int, ...]:
        """Transitive heads of w, nearest first."""
        out = []
        cur = w
        while cur in self.head_of:
            cur = self.head_of[cur]
            out.append(cur)
        return tuple(out)

    def self_domain(self, w: int) -> str | None:
        entry = self.ds.tree.words[w].entry
        return self.ds.domains.assoc[w][entry.template.self_slot]

    def immediate_members(self, did: str) -> tuple[Member, ...]:
        """Words sitting directly in the domain plus its maximal sub-domains."""
        members: list[tuple[int, Member]] = []
        owner = self.owner.get(did)
        if owner is not None:
            w, slot = owner
            if self.ds.tree.words[w].entry.template.self_slot == slot:
                members.append((w, ("w", w)))
        for kid in self.domain_children[did]:
            members.append((min(self.by_id[kid].members), ("d", kid)))
        members.sort(key=lambda pair: pair[0])
        return tuple(m for _, m in members)

    def member_span(self, member: Member) -> tuple[int, int]:
        kind, ref = member
        if kind == "w":
            return (ref, ref)  # type: ignore[return-value]
        return self.by_id[ref].span()  # type: ignore[index]

    def member_head_word(self, member: Member) -> int:
        """The word a member stands for: itself, or the sub-domain's introducer."""
        kind, ref = member
        if kind == "w":
            return ref  # type: ignore[return-value]
        return self.owner[ref][0]  # type: ignore[index]

    def matches_label(self, member: Member, label: str, introducer: int) -> bool:
        """True if the member's head word hangs below the introducer via `label`.

        The head word must be a transitive dependent of the introducer and
        its own incoming edge must carry the given dependency type.
        """
        hw = self.member_head_word(member)
        if hw == introducer or self.dtype_of.get(hw) != label:
            return False
        return introducer in self.ancestors(hw)


# ---------------------------------------------------------------------------
# linking conditions and derived membership


def iter_condition_violations(ds: DependencyStructure) -> Iterator[Violation]:
    """The four linking conditions, checked literally on the stored sets."""
    tree = ds.tree
    ods = ds.domains
    by_id = ods.by_id()

    for w in range(tree.n):
        own = [did for did in ods.realized(w) if w in by_id[did].members]
        if len(own) != 1:
            yield Violation(
                "ds.cond1",
                (w,),
                f"word {w} lies in {len(own)} domains of its own sequence "
                "(exactly one required)",
            )

    for w in range(tree.n):
        seq = ods.realized(w)
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                if by_id[seq[i]].members & by_id[seq[j]].members:
                    yield Violation(
                        "ds.cond2",
                        (w, seq[i], seq[j]),
                        f"domains {seq[i]!r} and {seq[j]!r} of word {w}'s "
                        "sequence are not pairwise disjoint",
                    )

    head_of = tree.head_of()
    for w in range(tree.n):
        if w == tree.root:
            continue
        containing = [d.id for d in ods.domains if w in d.members]
        if len(containing) < 2:
            yield Violation(
                "ds.cond3",
                (w,),
                f"word {w} lies in only {len(containing)} domain(s); "
                "two are required",
            )
            continue
        ancestors = set()
        cur = w
        while cur in head_of:
            cur = head_of[cur]
            ancestors.add(cur)
        hosted = any(
            did in containing
            for a in ancestors
            for did in ods.realized(a)
        )
        if not hosted:
            yield Violation(
                "ds.cond3",
                (w,),
                f"no domain containing word {w} belongs to a transitive head",
            )

    for w in range(tree.n):
        seq = ods.realized(w)
        for i in range(len(seq) - 1):
            left, right = by_id[seq[i]], by_id[seq[i + 1]]
            if max(left.members) >= min(right.members):
                yield Violation(
                    "ds.cond4",
                    (w, left.id, right.id),
                    f"sequence of word {w} is not ordered: {left.id!r} must "
                    f"precede {right.id!r} on the surface",
                )


def derived_member_sets(
    tree: DependencyTree,
    positional: dict[int, int],
    slot_of: dict[int, int],
) -> dict[tuple[int, int], frozenset[int]]:
    """Member sets every domain must carry, derived from the insertion choices.

    ``slot_of[w]`` names the template slot of positional(w) hosting w.  The
    word set of w (w plus everything inserted below it) lands in that slot;
    self slots additionally contain their introducing word.
    """
    inserted: dict[int, list[int]] = {w: [] for w in range(tree.n)}
    for w, p in positional.items():
        inserted[p].append(w)

    wordset: dict[int, frozenset[int]] = {}
    visiting: set[int] = set()

    def collect(w: int) -> frozenset[int]:
        if w in wordset:
            return wordset[w]
        if w in visiting:
            raise StructureError(f"insertion cycle through word {w}")
        visiting.add(w)
        acc = {w}
        for u in inserted[w]:
            acc |= collect(u)
        visiting.discard(w)
        wordset[w] = frozenset(acc)
        return wordset[w]

    out: dict[tuple[int, int], set[int]] = {}
    for w in range(tree.n):
        entry = tree.words[w].entry
        out[(w, entry.template.self_slot)] = {w}
    for w, p in positional.items():
        key = (p, slot_of[w])
        out.setdefault(key, set()).update(collect(w))
    return {key: frozenset(s) for key, s in out.items()}


def domain_id(owner: int, slot: int) -> str:
    """Canonical id for the realized domain of one template slot."""
    return f"d{owner}.{slot}"


def realize_structure(
    tree: DependencyTree,
    positional: dict[int, int],
    slot_of: dict[int, int],
) -> DependencyStructure:
    """Build the full structure determined by positional-head and slot choices.

    Word indices are taken as the surface order.  Every non-root word must
    appear in ``positional`` and ``slot_of``; member sets and the domain
    sequences are derived, and the top domain is added.
    """
    derived = derived_member_sets(tree, positional, slot_of)
    domains = [
        OrderDomain(domain_id(w, s), members) for (w, s), members in derived.items()
    ]
    domains.append(OrderDomain(TOP_DOMAIN_ID, frozenset(range(tree.n))))
    assoc = {}
    for w in range(tree.n):
        entry = tree.words[w].entry
        seq: list[str | None] = []
        for s in range(len(entry.template.slots)):
            seq.append(domain_id(w, s) if (w, s) in derived else None)
        assoc[w] = tuple(seq)
    features = {w.index: dict(w.entry.features) for w in tree.words}
    return DependencyStructure(
        tree=tree,
        features=features,
        domains=OrderDomainStructure(tuple(domains), assoc),
        positional=dict(positional),
    )


def iter_order_violations(ds: DependencyStructure) -> Iterator[Violation]:
    """Contiguity plus sequence-order checks; what surface_order asserts."""
    n = ds.tree.n
    for d in ds.domains.domains:
        if d.members and all(0 <= m < n for m in d.members):
            lo, hi = d.span()
            if len(d.members) != hi - lo + 1:
                yield Violation(
                    "ods.contiguity",
                    (d.id,),
                    f"domain {d.id!r} is not contiguous: {sorted(d.members)}",
                )
    by_id = ds.domains.by_id()
    for w in range(n):
        seq = [did for did in ds.domains.assoc.get(w, ()) if did in by_id]
        for i in range(len(seq) - 1):
            left, right = by_id[seq[i]], by_id[seq[i + 1]]
            if not left.members or not right.members:
                continue
            if max(left.members) >= min(right.members):
                yield Violation(
                    "ds.cond4",
                    (w, left.id, right.id),
                    f"sequence of word {w} is not ordered: {left.id!r} must "
                    f"precede {right.id!r} on the surface",
                )


def surface_order(ds: DependencyStructure) -> tuple[int, ...]:
    """Word indices in surface order, after asserting the domain layer agrees.

    Raises OrderInconsistencyError when some domain is discontinuous or a
    domain sequence contradicts the index order.
    """
    report = ValidationReport(tuple(iter_order_violations(ds)))
    if not report.ok:
        raise OrderInconsistencyError(report)
    return tuple(w.index for w in ds.tree.words)
