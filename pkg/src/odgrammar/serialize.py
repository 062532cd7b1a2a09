"""Text and JSON serialization of trees and structures.

The text form is line oriented; every line starts with a record keyword.
Token lines carry the entry ordinal (the entry's position among those
sharing its form in the lexicon) so that deserialization restores the
exact entry even when a form is ambiguous.  Rendering is canonical:
sorted records, sorted feature pairs, one space between fields.  For any
value x, parsing the rendered form restores x exactly; this also holds
for structures that would not validate, since the class and feature
columns are stored as given rather than recomputed from entries.
"""

from __future__ import annotations

import json

from .core import (
    DependencyEdge,
    DependencyStructure,
    DependencyTree,
    OrderDomain,
    OrderDomainStructure,
    WordToken,
)
from .lexicon import LexicalEntry, Lexicon, entries_for


class SerializationError(Exception):
    """Malformed serialized input."""


def _feat_fields(features: dict[str, str]) -> list[str]:
    return [f"{a}={v}" for a, v in sorted(features.items())]


def _parse_feats(fields: list[str], line_no: int) -> dict[str, str]:
    feats = {}
    for field in fields:
        if "=" not in field:
            raise SerializationError(
                f"line {line_no}: expected ATTR=VALUE, found {field!r}"
            )
        attr, value = field.split("=", 1)
        feats[attr] = value
    return feats


def _resolve_entry(
    form: str, ordinal: int, lex: Lexicon, line_no: int | None = None
) -> LexicalEntry:
    where = f"line {line_no}: " if line_no is not None else ""
    bucket = entries_for(form, lex)
    if not bucket:
        raise SerializationError(f"{where}no lexicon entry for form {form!r}")
    if not 0 <= ordinal < len(bucket):
        raise SerializationError(
            f"{where}form {form!r} has {len(bucket)} entries; "
            f"ordinal {ordinal} out of range"
        )
    return bucket[ordinal]


# ---------------------------------------------------------------------------
# trees


def render_tree_text(tree: DependencyTree, lex: Lexicon) -> str:
    lines = []
    for w in tree.words:
        fields = [
            "token",
            str(w.index),
            w.form,
            str(lex.entry_ordinal(w.entry)),
            tree.classes[w.index],
        ]
        lines.append(" ".join(fields))
    lines.append(f"root {tree.root}")
    for e in tree.edges:
        lines.append(f"edge {e.head} {e.dtype} {e.dependent}")
    return "\n".join(lines) + "\n"


def _scan_lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line.split()


def _build_tokens(records, lex: Lexicon):
    words = []
    classes = {}
    features = {}
    for line_no, fields in records:
        if len(fields) < 5:
            raise SerializationError(
                f"line {line_no}: token lines need index, form, entry, class"
            )
        index = _int(fields[1], line_no)
        form = fields[2]
        ordinal = _int(fields[3], line_no)
        entry = _resolve_entry(form, ordinal, lex, line_no)
        words.append(WordToken(index, form, entry))
        classes[index] = fields[4]
        features[index] = _parse_feats(fields[5:], line_no)
    return words, classes, features


def _int(field: str, line_no: int) -> int:
    try:
        return int(field)
    except ValueError:
        raise SerializationError(
            f"line {line_no}: expected an integer, found {field!r}"
        ) from None


def parse_tree_text(text: str, lex: Lexicon) -> DependencyTree:
    token_records = []
    root = None
    edges = []
    for line_no, fields in _scan_lines(text):
        kind = fields[0]
        if kind == "token":
            token_records.append((line_no, fields))
        elif kind == "root":
            root = _int(fields[1], line_no)
        elif kind == "edge":
            if len(fields) != 4:
                raise SerializationError(
                    f"line {line_no}: edge lines are 'edge HEAD DTYPE DEP'"
                )
            edges.append(
                DependencyEdge(_int(fields[1], line_no), _int(fields[3], line_no), fields[2])
            )
        else:
            raise SerializationError(
                f"line {line_no}: unknown record {kind!r} in a tree"
            )
    if root is None:
        raise SerializationError("tree input lacks a root record")
    words, classes, _ = _build_tokens(token_records, lex)
    return DependencyTree(tuple(words), root, tuple(edges), classes)


# ---------------------------------------------------------------------------
# structures


def render_structure_text(ds: DependencyStructure, lex: Lexicon) -> str:
    tree = ds.tree
    lines = []
    for w in tree.words:
        fields = [
            "token",
            str(w.index),
            w.form,
            str(lex.entry_ordinal(w.entry)),
            tree.classes[w.index],
        ]
        fields.extend(_feat_fields(ds.features.get(w.index, {})))
        lines.append(" ".join(fields))
    lines.append(f"root {tree.root}")
    for e in tree.edges:
        lines.append(f"edge {e.head} {e.dtype} {e.dependent}")
    for d in ds.domains.domains:
        lines.append(f"domain {d.id} " + " ".join(str(m) for m in d.sorted_members()))
    for w, seq in ds.domains.assoc.items():
        rendered = " ".join("-" if did is None else did for did in seq)
        lines.append(f"assoc {w} {rendered}")
    for w, p in ds.positional.items():
        lines.append(f"positional {w} {p}")
    return "\n".join(lines) + "\n"


def parse_structure_text(text: str, lex: Lexicon) -> DependencyStructure:
    token_records = []
    root = None
    edges = []
    domains = []
    assoc = {}
    positional = {}
    for line_no, fields in _scan_lines(text):
        kind = fields[0]
        if kind == "token":
            token_records.append((line_no, fields))
        elif kind == "root":
            root = _int(fields[1], line_no)
        elif kind == "edge":
            if len(fields) != 4:
                raise SerializationError(
                    f"line {line_no}: edge lines are 'edge HEAD DTYPE DEP'"
                )
            edges.append(
                DependencyEdge(_int(fields[1], line_no), _int(fields[3], line_no), fields[2])
            )
        elif kind == "domain":
            if len(fields) < 3:
                raise SerializationError(
                    f"line {line_no}: domain lines are 'domain ID MEMBER...'"
                )
            members = frozenset(_int(f, line_no) for f in fields[2:])
            domains.append(OrderDomain(fields[1], members))
        elif kind == "assoc":
            if len(fields) < 3:
                raise SerializationError(
                    f"line {line_no}: assoc lines are 'assoc WORD SLOT...'"
                )
            word = _int(fields[1], line_no)
            assoc[word] = tuple(None if f == "-" else f for f in fields[2:])
        elif kind == "positional":
            if len(fields) != 3:
                raise SerializationError(
                    f"line {line_no}: positional lines are 'positional WORD HEAD'"
                )
            positional[_int(fields[1], line_no)] = _int(fields[2], line_no)
        else:
            raise SerializationError(
                f"line {line_no}: unknown record {kind!r} in a structure"
            )
    if root is None:
        raise SerializationError("structure input lacks a root record")
    words, classes, features = _build_tokens(token_records, lex)
    tree = DependencyTree(tuple(words), root, tuple(edges), classes)
    return DependencyStructure(
        tree=tree,
        features=features,
        domains=OrderDomainStructure(tuple(domains), assoc),
        positional=positional,
    )


# ---------------------------------------------------------------------------
# JSON renderings


def _structure_obj(ds: DependencyStructure, lex: Lexicon) -> dict:
    tree = ds.tree
    return {
        "tokens": [
            {
                "index": w.index,
                "form": w.form,
                "entry": lex.entry_ordinal(w.entry),
                "class": tree.classes[w.index],
                "features": dict(sorted(ds.features.get(w.index, {}).items())),
            }
            for w in tree.words
        ],
        "root": tree.root,
        "edges": [
            {"head": e.head, "dtype": e.dtype, "dependent": e.dependent}
            for e in tree.edges
        ],
        "domains": [
            {"id": d.id, "members": list(d.sorted_members())}
            for d in ds.domains.domains
        ],
        "assoc": {str(w): list(seq) for w, seq in ds.domains.assoc.items()},
        "positional": {str(w): p for w, p in ds.positional.items()},
    }


def render_structure_json(ds: DependencyStructure, lex: Lexicon) -> str:
    return json.dumps(_structure_obj(ds, lex), sort_keys=True, separators=(",", ":"))


def parse_structure_json(text: str, lex: Lexicon) -> DependencyStructure:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SerializationError(f"not valid JSON: {exc}") from None
    try:
        words = []
        classes = {}
        features = {}
        for tok in obj["tokens"]:
            entry = _resolve_entry(tok["form"], tok["entry"], lex)
            words.append(WordToken(tok["index"], tok["form"], entry))
            classes[tok["index"]] = tok["class"]
            features[tok["index"]] = dict(tok["features"])
        tree = DependencyTree(
            tuple(words),
            obj["root"],
            tuple(
                DependencyEdge(e["head"], e["dependent"], e["dtype"])
                for e in obj["edges"]
            ),
            classes,
        )
        domains = tuple(
            OrderDomain(d["id"], frozenset(d["members"])) for d in obj["domains"]
        )
        assoc = {int(w): tuple(seq) for w, seq in obj["assoc"].items()}
        positional = {int(w): p for w, p in obj["positional"].items()}
    except (KeyError, TypeError) as exc:
        raise SerializationError(f"structure JSON misses field: {exc}") from None
    return DependencyStructure(
        tree=tree,
        features=features,
        domains=OrderDomainStructure(domains, assoc),
        positional=positional,
    )


def render_tree_json(tree: DependencyTree, lex: Lexicon) -> str:
    obj = {
        "tokens": [
            {
                "index": w.index,
                "form": w.form,
                "entry": lex.entry_ordinal(w.entry),
                "class": tree.classes[w.index],
            }
            for w in tree.words
        ],
        "root": tree.root,
        "edges": [
            {"head": e.head, "dtype": e.dtype, "dependent": e.dependent}
            for e in tree.edges
        ],
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def parse_tree_json(text: str, lex: Lexicon) -> DependencyTree:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SerializationError(f"not valid JSON: {exc}") from None
    try:
        words = []
        classes = {}
        for tok in obj["tokens"]:
            entry = _resolve_entry(tok["form"], tok["entry"], lex)
            words.append(WordToken(tok["index"], tok["form"], entry))
            classes[tok["index"]] = tok["class"]
        return DependencyTree(
            tuple(words),
            obj["root"],
            tuple(
                DependencyEdge(e["head"], e["dependent"], e["dtype"])
                for e in obj["edges"]
            ),
            classes,
        )
    except (KeyError, TypeError) as exc:
        raise SerializationError(f"tree JSON misses field: {exc}") from None


def canonical_structure(ds: DependencyStructure, lex: Lexicon) -> str:
    """Stable identity string used for deduplication and deterministic order."""
    return render_structure_text(ds, lex)
