"""Search-based parsing and generation over a lexicon.

Both directions walk the same candidate space: an entry assignment for the
tokens, a labeled head map, a positional-head choice for every non-root
word, a template-slot choice at each positional head, and (for generation)
an arrangement of every realized domain.  A candidate is kept when the
validator accepts the realized structure.

In pruned mode (the default) the search skips candidates that some
validator check is guaranteed to reject: unusable head slots, extraction
paths outside a slot's set, hosts whose domain features the dependent
cannot satisfy, cardinality-breaking slot choices, and arrangements that
break a precedence predicate.  Pruning never changes the result set; with
``prune=False`` the naive product is enumerated and candidates are
filtered only by the validators, which is what the differential tests run.

Every candidate counts against ``max_candidates``; exceeding the budget
raises ResourceLimitError rather than returning a truncated answer.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

from .constraints import FOLLOWS, LABELED_PAIR, PRECEDES, SELF_VS_ALL, check_valency
from .core import (
    DependencyEdge,
    DependencyStructure,
    DependencyTree,
    ResourceLimitError,
    StructureError,
    UnknownTokenError,
    WordToken,
    realize_structure,
    validate_tree,
)
from .lexicon import Lexicon, entries_for
from .serialize import canonical_structure
from .validate import iter_structure_violations

DEFAULT_MAX_CANDIDATES = 10_000_000


@dataclass(frozen=True)
class ParseResult:
    """Valid structures for a token sequence, sorted canonically.

    ``diagnostics`` summarizes the search; when ``structures`` is empty it
    says how far candidates got and which checks rejected them.
    """

    structures: tuple[DependencyStructure, ...]
    diagnostics: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.structures)


@dataclass(frozen=True)
class GenerationResult:
    """(surface, structure) pairs for a tree, sorted by surface then structure."""

    pairs: tuple[tuple[str, DependencyStructure], ...]
    diagnostics: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.pairs)

    def surfaces(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for surface, _ in self.pairs:
            seen.setdefault(surface)
        return tuple(seen)


class _Budget:
    __slots__ = ("limit", "used")

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def tick(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise ResourceLimitError(
                f"candidate budget of {self.limit} exhausted"
            )


class _Stats:
    """Search counters plus first-violation tallies for diagnostics."""

    def __init__(self):
        self.counts: Counter[str] = Counter()
        self.rejections: Counter[str] = Counter()

    def bump(self, key: str) -> None:
        self.counts[key] += 1

    def lines(self, stages: tuple[tuple[str, str], ...]) -> tuple[str, ...]:
        out = [f"{label}: {self.counts.get(key, 0)}" for key, label in stages]
        if self.rejections:
            ranked = sorted(self.rejections.items(), key=lambda kv: (-kv[1], kv[0]))
            top = ", ".join(f"{cond} ({n})" for cond, n in ranked[:6])
            out.append(f"rejections by first failing check: {top}")
        return tuple(out)


def _tree_maps(tree: DependencyTree):
    parent = tree.head_of()
    dtype_of = tree.dtype_of()
    ancestors: dict[int, list[int]] = {}
    for w in range(tree.n):
        if w == tree.root:
            continue
        chain = []
        cur = w
        while cur != tree.root:
            cur = parent[cur]
            chain.append(cur)
        ancestors[w] = chain
    return parent, dtype_of, ancestors


# ---------------------------------------------------------------------------
# realization search shared by parse and generate


def _positional_options(tree, parent, dtype_of, ancestors, prune):
    """Per-word candidate positional heads, nearest ancestor first."""
    options = []
    for w in sorted(ancestors):
        chain = ancestors[w]
        if not prune:
            options.append((w, list(chain)))
            continue
        slot = tree.words[parent[w]].entry.slot_for(dtype_of[w])
        if slot is None:
            options.append((w, []))
            continue
        allowed = []
        for i, anc in enumerate(chain):
            # dtypes crossed so far grow as we climb; once one falls outside
            # the slot's extraction set, every higher head is blocked too
            if i > 0 and dtype_of[chain[i - 1]] not in slot.extraction:
                break
            allowed.append(anc)
        options.append((w, allowed))
    return options


def _slot_options(tree, positional, prune):
    options = []
    for w in sorted(positional):
        host = tree.words[positional[w]].entry
        slots = range(len(host.template.slots))
        if not prune:
            options.append((w, list(slots)))
            continue
        feats = tree.words[w].entry.features
        keep = []
        for s in slots:
            required = None
            for req in host.domain_features:
                if req.slot == s:
                    required = req.required
                    break
            if required and any(feats.get(a) != v for a, v in required.items()):
                continue
            keep.append(s)
        options.append((w, keep))
    return options


def _cardinality_ok(tree, positional, slot_of) -> bool:
    """Immediate-member counts against every entry's cardinality bounds.

    A domain's immediate members are its owner (in the self slot) plus one
    per realized domain of each word inserted there.
    """
    realized_of: dict[int, set[int]] = {
        w: {tree.words[w].entry.template.self_slot} for w in range(tree.n)
    }
    for w, p in positional.items():
        realized_of[p].add(slot_of[w])
    # an inserted word contributes one immediate member per realized domain
    counts: Counter[tuple[int, int]] = Counter()
    for w, p in positional.items():
        counts[(p, slot_of[w])] += len(realized_of[w])
    for w in range(tree.n):
        entry = tree.words[w].entry
        self_slot = entry.template.self_slot
        counts[(w, self_slot)] += 1
        for card in entry.cardinalities:
            n = counts.get((w, card.slot), 0)
            if n < card.min:
                return False
            if card.max is not None and n > card.max:
                return False
    return True


def _iter_realizations(tree, lex, prune, budget, stats):
    """Yield (positional, slot_of) choices for a valency-checked tree."""
    parent, dtype_of, ancestors = _tree_maps(tree)
    non_root = sorted(ancestors)
    pos_opts = _positional_options(tree, parent, dtype_of, ancestors, prune)
    for pos_combo in itertools.product(*(opts for _, opts in pos_opts)):
        positional = dict(zip(non_root, pos_combo))
        slot_opts = _slot_options(tree, positional, prune)
        for slot_combo in itertools.product(*(opts for _, opts in slot_opts)):
            budget.tick()
            slot_of = dict(zip(non_root, slot_combo))
            if prune and not _cardinality_ok(tree, positional, slot_of):
                continue
            yield positional, slot_of


def _judge(ds, lex, stats) -> bool:
    stats.bump("realized")
    violation = next(iter_structure_violations(ds, lex), None)
    if violation is None:
        return True
    stats.rejections[violation.condition] += 1
    return False


# ---------------------------------------------------------------------------
# parsing


def _iter_head_maps(words, lex, prune, budget, stats):
    """Labeled trees over the words, as (root, parent, dtype_of) triples."""
    n = len(words)
    slot_names = [tuple(s.dtype for s in w.entry.valency) for w in words]
    for root in range(n):
        if prune and lex.root_classes:
            if words[root].entry.word_class not in lex.root_classes:
                continue
        rest = [w for w in range(n) if w != root]
        parent: dict[int, int] = {}
        dtype_of: dict[int, str] = {}
        used: set[tuple[int, str]] = set()

        def creates_cycle(h: int, w: int) -> bool:
            cur = h
            while cur in parent:
                cur = parent[cur]
                if cur == w:
                    return True
            return False

        def rec(k: int):
            if k == len(rest):
                budget.tick()
                stats.bump("maps")
                if _acyclic(parent, root, n):
                    yield root, dict(parent), dict(dtype_of)
                return
            w = rest[k]
            for h in range(n):
                if h == w:
                    continue
                entry = words[h].entry
                for dt in slot_names[h]:
                    if prune:
                        if (h, dt) in used:
                            continue
                        slot = entry.slot_for(dt)
                        if slot.dep_class and words[w].entry.word_class != slot.dep_class:
                            continue
                        wf = words[w].entry.features
                        if any(wf.get(a) != v for a, v in slot.features.items()):
                            continue
                        if creates_cycle(h, w):
                            continue
                    parent[w] = h
                    dtype_of[w] = dt
                    used.add((h, dt))
                    yield from rec(k + 1)
                    del parent[w]
                    del dtype_of[w]
                    used.discard((h, dt))

        yield from rec(0)


def _acyclic(parent: dict[int, int], root: int, n: int) -> bool:
    state = [0] * n
    state[root] = 2
    for start in range(n):
        if state[start]:
            continue
        path = []
        w = start
        while state[w] == 0:
            state[w] = 1
            path.append(w)
            w = parent[w]
        if state[w] == 1:
            return False
        for p in path:
            state[p] = 2
    return True


_PARSE_STAGES = (
    ("entries", "entry assignments tried"),
    ("maps", "labeled head maps enumerated"),
    ("trees", "head maps forming valency-checked trees"),
    ("realized", "realized structures validated"),
)


def parse(
    tokens: list[str] | tuple[str, ...],
    lex: Lexicon,
    *,
    prune: bool = True,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> ParseResult:
    """All valid structures whose surface order is exactly ``tokens``.

    Unknown tokens raise UnknownTokenError; blowing the candidate budget
    raises ResourceLimitError.  An empty token list yields no structures.
    """
    budget = _Budget(max_candidates)
    stats = _Stats()
    entry_options = []
    for tok in tokens:
        opts = entries_for(tok, lex)
        if not opts:
            raise UnknownTokenError(tok)
        entry_options.append(opts)
    found: dict[str, DependencyStructure] = {}
    for entry_combo in itertools.product(*entry_options) if tokens else ():
        stats.bump("entries")
        words = tuple(
            WordToken(i, tok, entry)
            for i, (tok, entry) in enumerate(zip(tokens, entry_combo))
        )
        classes = {w.index: w.entry.word_class for w in words}
        for root, parent, dtype_of in _iter_head_maps(words, lex, prune, budget, stats):
            edges = tuple(
                DependencyEdge(parent[w], w, dtype_of[w]) for w in sorted(parent)
            )
            tree = DependencyTree(words, root, edges, classes)
            tree_report = validate_tree(tree, lex)
            valency_report = check_valency(tree, lex)
            if not (tree_report.ok and valency_report.ok):
                first = (tree_report.violations + valency_report.violations)[0]
                stats.rejections[first.condition] += 1
                continue
            stats.bump("trees")
            for positional, slot_of in _iter_realizations(
                tree, lex, prune, budget, stats
            ):
                ds = realize_structure(tree, positional, slot_of)
                if _judge(ds, lex, stats):
                    found.setdefault(canonical_structure(ds, lex), ds)
    structures = tuple(found[key] for key in sorted(found))
    return ParseResult(structures, stats.lines(_PARSE_STAGES))


# ---------------------------------------------------------------------------
# generation


def _arrangements(items, sequenced):
    """Orderings of one domain's immediate members.

    ``items`` are ("self", owner) or ("dom", word, slot) markers.  With
    ``sequenced`` set, orderings that put a word's own domains out of
    template-slot order are dropped, since they can never satisfy the
    sequence-order condition; naive mode keeps them and lets the validator
    reject them.
    """
    if len(items) <= 1:
        yield tuple(items)
        return
    for perm in itertools.permutations(items):
        if sequenced:
            last: dict[int, int] = {}
            ok = True
            for item in perm:
                if item[0] != "dom":
                    continue
                _, word, slot = item
                if last.get(word, -1) > slot:
                    ok = False
                    break
                last[word] = slot
            if not ok:
                continue
        yield perm


def _order_allowed(owner: int, slot: int, perm, entry, dtype_of) -> bool:
    """Do the owner's predicates tolerate this arrangement of (owner, slot)?"""
    for pred in entry.predicates:
        if pred.kind == SELF_VS_ALL:
            if slot != entry.template.self_slot:
                continue
            pos = next(i for i, it in enumerate(perm) if it[0] == "self")
            if pred.direction == PRECEDES and pos != 0:
                return False
            if pred.direction == FOLLOWS and pos != len(perm) - 1:
                return False
        elif pred.kind == LABELED_PAIR:
            def label_of(item):
                return None if item[0] == "self" else dtype_of[item[1]]

            lefts = [i for i, it in enumerate(perm) if label_of(it) in pred.left]
            rights = [i for i, it in enumerate(perm) if label_of(it) in pred.right]
            for i in lefts:
                for j in rights:
                    if perm[i][1] == perm[j][1]:
                        continue
                    if pred.direction == PRECEDES and i > j:
                        return False
                    if pred.direction == FOLLOWS and i < j:
                        return False
    return True


_GEN_STAGES = (
    ("placements", "positional and slot assignments tried"),
    ("orders", "domain arrangements laid out"),
    ("realized", "realized structures validated"),
)


def generate(
    tree: DependencyTree,
    lex: Lexicon,
    *,
    prune: bool = True,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> GenerationResult:
    """All (surface, structure) pairs realizing ``tree`` in any word order.

    The tree's indices only identify words here; every output order is
    tried.  Tokens must be bound to entries whose class matches the tree's
    class map, and the tree itself must be well formed, else
    StructureError.  A tree that breaks valency yields no pairs.
    """
    for w in tree.words:
        if w.entry is None:
            raise StructureError(f"word {w.index} is not bound to a lexical entry")
        if tree.classes.get(w.index) != w.entry.word_class:
            raise StructureError(
                f"word {w.index} has class {tree.classes.get(w.index)!r} but its "
                f"entry is {w.entry.word_class!r}"
            )
    report = validate_tree(tree, lex)
    if not report.ok:
        raise StructureError("tree is not well formed:\n" + report.render())

    budget = _Budget(max_candidates)
    stats = _Stats()
    # valency is order-independent: when it fails, no permutation validates
    if prune and not check_valency(tree, lex).ok:
        return GenerationResult((), stats.lines(_GEN_STAGES))

    dtype_of = tree.dtype_of()
    found: dict[tuple[str, str], tuple[str, DependencyStructure]] = {}
    for positional, slot_of in _iter_realizations(tree, lex, prune, budget, stats):
        stats.bump("placements")
        inserted: dict[tuple[int, int], list[int]] = {}
        for w, p in positional.items():
            inserted.setdefault((p, slot_of[w]), []).append(w)
        realized_of: dict[int, list[int]] = {}
        for w in range(tree.n):
            slots = {tree.words[w].entry.template.self_slot}
            slots.update(s for (p, s) in inserted if p == w)
            realized_of[w] = sorted(slots)

        domain_items: dict[tuple[int, int], list[tuple]] = {}
        for w in range(tree.n):
            for s in realized_of[w]:
                items: list[tuple] = []
                if s == tree.words[w].entry.template.self_slot:
                    items.append(("self", w))
                for u in inserted.get((w, s), ()):
                    for s2 in realized_of[u]:
                        items.append(("dom", u, s2))
                domain_items[(w, s)] = items

        ordered_ids = sorted(domain_items)
        choice_lists = []
        for did in ordered_ids:
            w, s = did
            entry = tree.words[w].entry
            perms = []
            for perm in _arrangements(domain_items[did], sequenced=prune):
                if prune and not _order_allowed(w, s, perm, entry, dtype_of):
                    continue
                perms.append(perm)
            choice_lists.append(perms)

        for combo in itertools.product(*choice_lists):
            budget.tick()
            stats.bump("orders")
            chosen = dict(zip(ordered_ids, combo))

            def emit(did, out):
                for item in chosen[did]:
                    if item[0] == "self":
                        out.append(item[1])
                    else:
                        emit((item[1], item[2]), out)

            layout: list[int] = []
            # the top domain holds the root's whole sequence; its members
            # are the root's domains, fixed in sequence order
            for s in realized_of[tree.root]:
                emit((tree.root, s), layout)
            new_index = {old: i for i, old in enumerate(layout)}
            words = tuple(
                WordToken(i, tree.words[old].form, tree.words[old].entry)
                for i, old in enumerate(layout)
            )
            edges = tuple(
                DependencyEdge(new_index[e.head], new_index[e.dependent], e.dtype)
                for e in tree.edges
            )
            classes = {new_index[w]: c for w, c in tree.classes.items()}
            permuted = DependencyTree(words, new_index[tree.root], edges, classes)
            pos2 = {new_index[w]: new_index[p] for w, p in positional.items()}
            slot2 = {new_index[w]: s for w, s in slot_of.items()}
            ds = realize_structure(permuted, pos2, slot2)
            if _judge(ds, lex, stats):
                surface = " ".join(w.form for w in words)
                found.setdefault((surface, canonical_structure(ds, lex)), (surface, ds))
    pairs = tuple(found[key] for key in sorted(found))
    return GenerationResult(pairs, stats.lines(_GEN_STAGES))
