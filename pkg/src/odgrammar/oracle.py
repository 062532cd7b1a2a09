"""Exhaustive reference enumeration for small inputs.

The functions in this module answer the same questions as the engine
(`odgrammar.engine`) but by brute force: every head assignment, every
positional-head choice, every slot assignment, and (for ordering) every
permutation of the input is generated and handed to the validator.  Nothing
here knows about the engine's search order or its pruning; the only code
shared with the engine is the validator itself and the core constructors.
That makes the oracle slow but trustworthy, which is the point: engine
results are tested against it on a corpus of short inputs.

Inputs longer than ``OracleConfig.max_tokens`` raise ``TokenLimitError``
rather than silently taking hours.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .constraints import check_valency
from .core import (
    DependencyEdge,
    DependencyStructure,
    DependencyTree,
    TokenLimitError,
    UnknownTokenError,
    WordToken,
    realize_structure,
    validate_tree,
)
from .lexicon import Lexicon, entries_for
from .serialize import canonical_structure
from .validate import structure_is_valid


@dataclass(frozen=True)
class OracleConfig:
    """Hard size limit for the exhaustive search."""

    max_tokens: int = 7


_DEFAULT_CONFIG = OracleConfig()


def _check_size(n: int, config: OracleConfig) -> None:
    if n > config.max_tokens:
        raise TokenLimitError(
            f"input has {n} tokens, oracle limit is {config.max_tokens}"
        )


def _parent_maps(words, slot_names):
    """Yield (root, parent, dtype_of) for every labeled head assignment.

    Every non-root word picks every other word as head, with every dtype
    that the head's entry has a slot for.  Assignments whose parent map is
    not a tree (has a cycle) are dropped; everything else is left to the
    validator.
    """
    n = len(words)
    for root in range(n):
        rest = [w for w in range(n) if w != root]
        choices = []
        for w in rest:
            opts = [
                (h, dt)
                for h in range(n)
                if h != w
                for dt in slot_names[h]
            ]
            if not opts:
                break
            choices.append(opts)
        if len(choices) != len(rest):
            continue
        for combo in itertools.product(*choices):
            parent = {w: hd for w, (hd, _) in zip(rest, combo)}
            if not _is_tree(parent, root, n):
                continue
            dtype_of = {w: dt for w, (_, dt) in zip(rest, combo)}
            yield root, parent, dtype_of


def _is_tree(parent: dict[int, int], root: int, n: int) -> bool:
    # every word must reach the root without revisiting anything
    state = [0] * n  # 0 unseen, 1 on current path, 2 done
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


def _ancestor_chain(parent: dict[int, int], root: int, w: int) -> list[int]:
    chain = []
    cur = w
    while cur != root:
        cur = parent[cur]
        chain.append(cur)
    return chain


def _valid_structures(tree: DependencyTree, lex: Lexicon):
    """Yield every valid DependencyStructure over a fixed tree."""
    if not validate_tree(tree, lex).ok:
        return
    if not check_valency(tree, lex).ok:
        return
    n = tree.n
    parent = {e.dependent: e.head for e in tree.edges}
    ancestors = {
        w: _ancestor_chain(parent, tree.root, w) for w in range(n) if w != tree.root
    }
    non_root = sorted(ancestors)
    pos_choices = [ancestors[w] for w in non_root]
    for pos_combo in itertools.product(*pos_choices):
        positional = dict(zip(non_root, pos_combo))
        slot_choices = [
            range(len(tree.words[positional[w]].entry.template.slots))
            for w in non_root
        ]
        for slot_combo in itertools.product(*slot_choices):
            slot_of = dict(zip(non_root, slot_combo))
            ds = realize_structure(tree, positional, slot_of)
            if structure_is_valid(ds, lex):
                yield ds


def oracle_parse(
    tokens: list[str] | tuple[str, ...],
    lex: Lexicon,
    config: OracleConfig | None = None,
) -> tuple[DependencyStructure, ...]:
    """All valid structures whose surface order is exactly `tokens`.

    Results are sorted by their canonical serialization.
    """
    config = config or _DEFAULT_CONFIG
    n = len(tokens)
    _check_size(n, config)
    entry_options = []
    for tok in tokens:
        opts = entries_for(tok, lex)
        if not opts:
            raise UnknownTokenError(tok)
        entry_options.append(opts)
    found: dict[str, DependencyStructure] = {}
    for entry_combo in itertools.product(*entry_options):
        words = tuple(
            WordToken(i, tok, entry)
            for i, (tok, entry) in enumerate(zip(tokens, entry_combo))
        )
        classes = {w.index: w.entry.word_class for w in words}
        slot_names = [tuple(s.dtype for s in e.valency) for e in entry_combo]
        for root, parent, dtype_of in _parent_maps(words, slot_names):
            edges = tuple(
                DependencyEdge(parent[w], w, dtype_of[w])
                for w in sorted(parent)
            )
            tree = DependencyTree(words, root, edges, classes)
            for ds in _valid_structures(tree, lex):
                found.setdefault(canonical_structure(ds, lex), ds)
    return tuple(found[key] for key in sorted(found))


def oracle_orders(
    tree: DependencyTree,
    lex: Lexicon,
    config: OracleConfig | None = None,
) -> tuple[str, ...]:
    """All surface orders of `tree`'s words that admit a valid structure.

    Every permutation of the words is tried; a permutation is accepted when
    at least one choice of positional heads and slots validates.  Returns
    the sorted surface strings.  Head relations, dependency types, and
    entries are preserved under permutation; only indices change.
    """
    config = config or _DEFAULT_CONFIG
    n = tree.n
    _check_size(n, config)
    if not validate_tree(tree, lex).ok:
        return ()
    # valency does not depend on surface order, so one failed check here
    # rules out every permutation
    if not check_valency(tree, lex).ok:
        return ()
    accepted: set[str] = set()
    old_words = tree.words
    for perm in itertools.permutations(range(n)):
        # perm[i] is the old index of the word now at position i
        new_index = {old: new for new, old in enumerate(perm)}
        words = tuple(
            WordToken(i, old_words[old].form, old_words[old].entry)
            for i, old in enumerate(perm)
        )
        edges = tuple(
            DependencyEdge(new_index[e.head], new_index[e.dependent], e.dtype)
            for e in tree.edges
        )
        classes = {new_index[w]: c for w, c in tree.classes.items()}
        permuted = DependencyTree(words, new_index[tree.root], edges, classes)
        for _ in _valid_structures(permuted, lex):
            accepted.add(" ".join(w.form for w in words))
            break
    return tuple(sorted(accepted))
