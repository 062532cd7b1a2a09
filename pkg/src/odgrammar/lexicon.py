"""Lexicon model and its text format.

A lexicon declares the symbol inventories (dependency types, word classes,
attributes with finite value sets), the classes admitted at the sentence
root, and one or more entries per surface form.  Each entry fixes a word
class, features, a valency frame, a template of named order-domain slots
with one self slot, and the constraints scoped to those slots.

The format is line oriented at the top level; entry bodies are brace
blocks of semicolon-terminated statements:

    dtypes: subj obj vpart det propo
    classes: Vfin Vpart N Det
    attr case: nom acc dat gen
    root: Vfin

    entry "hat" class=Vfin {
      slot subj: class=N feat case=nom required extract {};
      slot vpart: class=Vpart required extract {};
      domains [vf mf nf] self=mf;
      card vf = 1;
      order self < * in mf;
      order <vpart> after <subj,obj>;
    }

Inside a body, `feat a=v` states entry features while `feat SLOT a=v`
states a requirement on every member head of that slot's domain.  All
parse errors carry a line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .constraints import (
    FOLLOWS,
    LABELED_PAIR,
    PRECEDES,
    SELF_VS_ALL,
    CardinalityConstraint,
    DomainFeatureRequirement,
    PrecedencePredicate,
)


class LexiconError(Exception):
    """Problem in a lexicon source; carries the position it was found at."""

    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class ValencySlot:
    """One governed dependency of an entry; at most one slot per type."""

    dtype: str
    required: bool = False
    dep_class: str | None = None
    features: dict[str, str] = field(default_factory=dict)
    extraction: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "features", dict(self.features))
        object.__setattr__(self, "extraction", frozenset(self.extraction))


@dataclass(frozen=True)
class DomainTemplate:
    """Ordered named domain slots; exactly one receives the word itself."""

    slots: tuple[str, ...]
    self_slot: int

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        if not self.slots:
            raise ValueError("a template needs at least one slot")
        if not 0 <= self.self_slot < len(self.slots):
            raise ValueError("self slot out of range")
        if len(set(self.slots)) != len(self.slots):
            raise ValueError("template slot names must be distinct")


@dataclass(frozen=True)
class LexicalEntry:
    form: str
    word_class: str
    features: dict[str, str] = field(default_factory=dict)
    valency: tuple[ValencySlot, ...] = ()
    template: DomainTemplate = DomainTemplate(("d",), 0)
    cardinalities: tuple[CardinalityConstraint, ...] = ()
    domain_features: tuple[DomainFeatureRequirement, ...] = ()
    predicates: tuple[PrecedencePredicate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "features", dict(self.features))
        object.__setattr__(self, "valency", tuple(self.valency))
        object.__setattr__(self, "cardinalities", tuple(self.cardinalities))
        object.__setattr__(self, "domain_features", tuple(self.domain_features))
        object.__setattr__(self, "predicates", tuple(self.predicates))

    def slot_for(self, dtype: str) -> ValencySlot | None:
        for slot in self.valency:
            if slot.dtype == dtype:
                return slot
        return None


@dataclass(frozen=True)
class Lexicon:
    dtypes: tuple[str, ...]
    classes: tuple[str, ...]
    attributes: dict[str, tuple[str, ...]]
    root_classes: tuple[str, ...]
    entries: dict[str, tuple[LexicalEntry, ...]]

    def __post_init__(self):
        object.__setattr__(
            self, "attributes", {a: tuple(v) for a, v in self.attributes.items()}
        )
        object.__setattr__(
            self, "entries", {f: tuple(es) for f, es in self.entries.items()}
        )

    def dtype_set(self) -> frozenset[str]:
        return frozenset(self.dtypes)

    def class_set(self) -> frozenset[str]:
        return frozenset(self.classes)

    def entry_ordinal(self, entry: LexicalEntry) -> int:
        """Position of the entry among those sharing its form."""
        bucket = self.entries.get(entry.form, ())
        for i, candidate in enumerate(bucket):
            if candidate == entry:
                return i
        raise ValueError(f"entry for {entry.form!r} is not in this lexicon")


def entries_for(form: str, lex: Lexicon) -> tuple[LexicalEntry, ...]:
    """All entries whose form matches exactly (case sensitive); may be empty."""
    return lex.entries.get(form, ())


# ---------------------------------------------------------------------------
# tokenizer


@dataclass(frozen=True)
class _Token:
    kind: str  # word | string | punct
    value: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r'"(?P<string>[^"\n]*)"'
    r"|(?P<punct><=|>=|[:;{}\[\]=,<>*])"
    r'|(?P<word>[^\s:;{}\[\]=,<>*"#]+)'
)


def _tokenize_line(text: str, line_no: int) -> list[_Token]:
    text = text.split("#", 1)[0]
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise LexiconError(f"cannot read {text[pos]!r}", line_no, pos + 1)
        if m.lastgroup == "string":
            tokens.append(_Token("string", m.group("string"), line_no, pos + 1))
        elif m.lastgroup == "punct":
            tokens.append(_Token("punct", m.group("punct"), line_no, pos + 1))
        else:
            tokens.append(_Token("word", m.group("word"), line_no, pos + 1))
        pos = m.end()
    return tokens


class _TokenStream:
    def __init__(self, tokens: list[_Token], end_line: int):
        self.tokens = tokens
        self.pos = 0
        self.end_line = end_line

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expect: str | None = None, kind: str | None = None) -> _Token:
        tok = self.peek()
        if tok is None:
            raise LexiconError("unexpected end of statement", self.end_line)
        if kind is not None and tok.kind != kind:
            raise LexiconError(
                f"expected {kind}, found {tok.value!r}", tok.line, tok.col
            )
        if expect is not None and tok.value != expect:
            raise LexiconError(
                f"expected {expect!r}, found {tok.value!r}", tok.line, tok.col
            )
        self.pos += 1
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.value == value

    def exhausted(self) -> bool:
        return self.pos >= len(self.tokens)


# ---------------------------------------------------------------------------
# parser


def load_lexicon(text: str) -> Lexicon:
    """Parse lexicon source text; raise LexiconError with line and column."""
    dtypes: list[str] = []
    classes: list[str] = []
    attributes: dict[str, tuple[str, ...]] = {}
    root_classes: list[str] = []
    raw_entries: list[tuple[list[_Token], int]] = []

    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line_no = i + 1
        tokens = _tokenize_line(lines[i], line_no)
        if not tokens:
            i += 1
            continue
        head = tokens[0]
        if head.value in ("dtypes", "classes", "root") and head.kind == "word":
            if len(tokens) < 2 or tokens[1].value != ":":
                raise LexiconError(f"expected ':' after {head.value}", line_no)
            values = [t.value for t in tokens[2:]]
            if any(t.kind != "word" for t in tokens[2:]) or not values:
                raise LexiconError(f"expected symbols after {head.value}:", line_no)
            target = {"dtypes": dtypes, "classes": classes, "root": root_classes}
            target[head.value].extend(values)
            i += 1
        elif head.value == "attr":
            if len(tokens) < 4 or tokens[2].value != ":":
                raise LexiconError("expected 'attr NAME: VALUE...'", line_no)
            name = tokens[1].value
            if name in attributes:
                raise LexiconError(f"attribute {name!r} declared twice", line_no)
            attributes[name] = tuple(t.value for t in tokens[3:])
            if not attributes[name]:
                raise LexiconError(f"attribute {name!r} has no values", line_no)
            i += 1
        elif head.value == "entry":
            block = list(tokens)
            depth = sum(1 for t in tokens if t.value == "{") - sum(
                1 for t in tokens if t.value == "}"
            )
            if "{" not in [t.value for t in tokens]:
                raise LexiconError("expected '{' in entry header", line_no)
            i += 1
            while depth > 0:
                if i >= len(lines):
                    raise LexiconError("unterminated entry block", line_no)
                more = _tokenize_line(lines[i], i + 1)
                depth += sum(1 for t in more if t.value == "{")
                depth -= sum(1 for t in more if t.value == "}")
                block.extend(more)
                i += 1
            raw_entries.append((block, line_no))
        else:
            raise LexiconError(
                f"unexpected {head.value!r} at top level", line_no, head.col
            )

    inventories = _Inventories(
        tuple(dtypes), tuple(classes), attributes, tuple(root_classes)
    )
    inventories.check_declared(1)

    entries: dict[str, list[LexicalEntry]] = {}
    for block, line_no in raw_entries:
        entry = _parse_entry(block, line_no, inventories)
        entries.setdefault(entry.form, []).append(entry)

    return Lexicon(
        dtypes=tuple(dtypes),
        classes=tuple(classes),
        attributes=attributes,
        root_classes=tuple(root_classes),
        entries={f: tuple(es) for f, es in entries.items()},
    )


@dataclass
class _Inventories:
    dtypes: tuple[str, ...]
    classes: tuple[str, ...]
    attributes: dict[str, tuple[str, ...]]
    root_classes: tuple[str, ...]

    def check_declared(self, line: int):
        for name, seq in (("dtypes", self.dtypes), ("classes", self.classes)):
            if len(set(seq)) != len(seq):
                raise LexiconError(f"duplicate symbol in {name}", line)
        for cls in self.root_classes:
            if cls not in self.classes:
                raise LexiconError(f"root class {cls!r} is not declared", line)

    def need_dtype(self, tok: _Token):
        if tok.value not in self.dtypes:
            raise LexiconError(
                f"dependency type {tok.value!r} is not declared", tok.line, tok.col
            )

    def need_class(self, tok: _Token):
        if tok.value not in self.classes:
            raise LexiconError(
                f"class {tok.value!r} is not declared", tok.line, tok.col
            )

    def need_attr(self, attr: _Token, value: _Token):
        values = self.attributes.get(attr.value)
        if values is None:
            raise LexiconError(
                f"attribute {attr.value!r} is not declared", attr.line, attr.col
            )
        if value.value not in values:
            raise LexiconError(
                f"value {value.value!r} is not declared for attribute "
                f"{attr.value!r}",
                value.line,
                value.col,
            )


def _parse_feature_pairs(ts: _TokenStream, inv: _Inventories) -> dict[str, str]:
    """One or more ATTR=VALUE pairs."""
    pairs: dict[str, str] = {}
    while True:
        tok = ts.peek()
        if tok is None or tok.kind != "word":
            break
        follow = ts.tokens[ts.pos + 1] if ts.pos + 1 < len(ts.tokens) else None
        if follow is None or follow.value != "=":
            break
        attr = ts.next(kind="word")
        ts.next(expect="=")
        value = ts.next(kind="word")
        inv.need_attr(attr, value)
        if attr.value in pairs:
            raise LexiconError(
                f"attribute {attr.value!r} given twice", attr.line, attr.col
            )
        pairs[attr.value] = value.value
    if not pairs:
        tok = ts.peek()
        line = tok.line if tok else ts.end_line
        raise LexiconError("expected ATTR=VALUE", line)
    return pairs


def _parse_label_set(ts: _TokenStream, inv: _Inventories) -> tuple[str, ...]:
    ts.next(expect="<")
    labels = []
    while True:
        tok = ts.next(kind="word")
        inv.need_dtype(tok)
        labels.append(tok.value)
        if ts.at(","):
            ts.next()
            continue
        break
    ts.next(expect=">")
    return tuple(labels)


def _parse_entry(block: list[_Token], line_no: int, inv: _Inventories) -> LexicalEntry:
    ts = _TokenStream(block, block[-1].line if block else line_no)
    ts.next(expect="entry")
    form_tok = ts.next(kind="string")
    form = form_tok.value
    if not form or any(c.isspace() for c in form):
        raise LexiconError(
            "entry forms must be non-empty and free of whitespace",
            form_tok.line,
            form_tok.col,
        )
    ts.next(expect="class")
    ts.next(expect="=")
    cls = ts.next(kind="word")
    inv.need_class(cls)
    ts.next(expect="{")

    features: dict[str, str] = {}
    valency: list[ValencySlot] = []
    template: DomainTemplate | None = None
    # statements referring to template slots, resolved once the template is known
    card_stmts: list[tuple[_Token, str, _Token]] = []
    domfeat_stmts: list[tuple[_Token, dict[str, str]]] = []
    order_stmts: list[tuple[PrecedencePredicate | None, _Token | None, _Token]] = []

    while not ts.at("}"):
        stmt_head = ts.next(kind="word")
        if stmt_head.value == "slot":
            name = ts.next(kind="word")
            inv.need_dtype(name)
            if any(s.dtype == name.value for s in valency):
                raise LexiconError(
                    f"duplicate slot for dependency type {name.value!r}",
                    name.line,
                    name.col,
                )
            ts.next(expect=":")
            dep_class = None
            slot_feats: dict[str, str] = {}
            required = False
            extraction: set[str] = set()
            while not ts.at(";"):
                tok = ts.next(kind="word")
                if tok.value == "class":
                    ts.next(expect="=")
                    c = ts.next(kind="word")
                    inv.need_class(c)
                    dep_class = c.value
                elif tok.value == "feat":
                    slot_feats.update(_parse_feature_pairs(ts, inv))
                elif tok.value == "required":
                    required = True
                elif tok.value == "optional":
                    required = False
                elif tok.value == "extract":
                    ts.next(expect="{")
                    while not ts.at("}"):
                        d = ts.next(kind="word")
                        inv.need_dtype(d)
                        extraction.add(d.value)
                        if ts.at(","):
                            ts.next()
                    ts.next(expect="}")
                else:
                    raise LexiconError(
                        f"unexpected {tok.value!r} in slot statement",
                        tok.line,
                        tok.col,
                    )
            valency.append(
                ValencySlot(
                    dtype=name.value,
                    required=required,
                    dep_class=dep_class,
                    features=slot_feats,
                    extraction=frozenset(extraction),
                )
            )
        elif stmt_head.value == "domains":
            if template is not None:
                raise LexiconError(
                    "domains declared twice", stmt_head.line, stmt_head.col
                )
            ts.next(expect="[")
            names = []
            while not ts.at("]"):
                names.append(ts.next(kind="word").value)
            ts.next(expect="]")
            ts.next(expect="self")
            ts.next(expect="=")
            self_name = ts.next(kind="word")
            if len(set(names)) != len(names) or not names:
                raise LexiconError(
                    "template slots must be non-empty and distinct",
                    stmt_head.line,
                    stmt_head.col,
                )
            if self_name.value not in names:
                raise LexiconError(
                    f"self slot {self_name.value!r} is not a template slot",
                    self_name.line,
                    self_name.col,
                )
            template = DomainTemplate(tuple(names), names.index(self_name.value))
        elif stmt_head.value == "card":
            slot_name = ts.next(kind="word")
            op = ts.next(kind="punct")
            if op.value not in ("=", "<=", ">="):
                raise LexiconError(
                    f"expected '=', '<=' or '>=', found {op.value!r}",
                    op.line,
                    op.col,
                )
            bound = ts.next()
            if bound.value != "1":
                raise LexiconError(
                    "cardinality bounds other than 1 are not supported",
                    bound.line,
                    bound.col,
                )
            card_stmts.append((slot_name, op.value, bound))
        elif stmt_head.value == "feat":
            follow = ts.tokens[ts.pos + 1] if ts.pos + 1 < len(ts.tokens) else None
            if follow is not None and follow.value == "=":
                features.update(_parse_feature_pairs(ts, inv))
            else:
                slot_name = ts.next(kind="word")
                domfeat_stmts.append((slot_name, _parse_feature_pairs(ts, inv)))
        elif stmt_head.value == "order":
            if ts.at("self"):
                ts.next()
                op = ts.next(kind="punct")
                if op.value not in ("<", ">"):
                    raise LexiconError(
                        f"expected '<' or '>', found {op.value!r}", op.line, op.col
                    )
                ts.next(expect="*")
                scope = None
                if ts.at("in"):
                    ts.next()
                    scope = ts.next(kind="word")
                pred = PrecedencePredicate(
                    SELF_VS_ALL, PRECEDES if op.value == "<" else FOLLOWS
                )
                order_stmts.append((pred, scope, stmt_head))
            else:
                left = _parse_label_set(ts, inv)
                rel = ts.next(kind="word")
                if rel.value not in ("before", "after"):
                    raise LexiconError(
                        f"expected 'before' or 'after', found {rel.value!r}",
                        rel.line,
                        rel.col,
                    )
                right = _parse_label_set(ts, inv)
                pred = PrecedencePredicate(
                    LABELED_PAIR,
                    PRECEDES if rel.value == "before" else FOLLOWS,
                    left,
                    right,
                )
                order_stmts.append((pred, None, stmt_head))
        else:
            raise LexiconError(
                f"unexpected {stmt_head.value!r} in entry body",
                stmt_head.line,
                stmt_head.col,
            )
        ts.next(expect=";")

    ts.next(expect="}")
    if not ts.exhausted():
        tok = ts.peek()
        raise LexiconError(
            f"unexpected {tok.value!r} after entry body", tok.line, tok.col
        )

    if template is None:
        raise LexiconError(f"entry {form!r} declares no domains", line_no)

    def slot_ordinal(tok: _Token) -> int:
        if tok.value not in template.slots:
            raise LexiconError(
                f"{tok.value!r} is not a template slot of this entry",
                tok.line,
                tok.col,
            )
        return template.slots.index(tok.value)

    cardinalities = []
    for slot_name, op, _ in card_stmts:
        ordinal = slot_ordinal(slot_name)
        if op == "=":
            cardinalities.append(CardinalityConstraint(ordinal, 1, 1))
        elif op == "<=":
            cardinalities.append(CardinalityConstraint(ordinal, 0, 1))
        else:
            cardinalities.append(CardinalityConstraint(ordinal, 1, None))

    domain_features = [
        DomainFeatureRequirement(slot_ordinal(tok), pairs)
        for tok, pairs in domfeat_stmts
    ]

    predicates = []
    for pred, scope, stmt_tok in order_stmts:
        if scope is not None:
            if slot_ordinal(scope) != template.self_slot:
                raise LexiconError(
                    "self-ordering predicates are scoped to the self slot",
                    scope.line,
                    scope.col,
                )
        predicates.append(pred)

    return LexicalEntry(
        form=form,
        word_class=cls.value,
        features=features,
        valency=tuple(valency),
        template=template,
        cardinalities=tuple(cardinalities),
        domain_features=tuple(domain_features),
        predicates=tuple(predicates),
    )


# ---------------------------------------------------------------------------
# renderer


def render_lexicon(lex: Lexicon) -> str:
    """Canonical text for a lexicon; load_lexicon(render_lexicon(lex)) == lex."""
    out = []
    out.append("dtypes: " + " ".join(lex.dtypes))
    out.append("classes: " + " ".join(lex.classes))
    for attr, values in lex.attributes.items():
        out.append(f"attr {attr}: " + " ".join(values))
    if lex.root_classes:
        out.append("root: " + " ".join(lex.root_classes))
    for form, entries in lex.entries.items():
        for entry in entries:
            out.append("")
            out.extend(_render_entry(entry))
    return "\n".join(out) + "\n"


def _render_feats(features: dict[str, str]) -> str:
    return " ".join(f"{a}={v}" for a, v in sorted(features.items()))


def _render_entry(entry: LexicalEntry) -> list[str]:
    lines = [f'entry "{entry.form}" class={entry.word_class} {{']
    if entry.features:
        lines.append(f"  feat {_render_feats(entry.features)};")
    for slot in entry.valency:
        parts = [f"slot {slot.dtype}:"]
        if slot.dep_class is not None:
            parts.append(f"class={slot.dep_class}")
        if slot.features:
            parts.append(f"feat {_render_feats(slot.features)}")
        parts.append("required" if slot.required else "optional")
        parts.append("extract {" + ",".join(sorted(slot.extraction)) + "}")
        lines.append("  " + " ".join(parts) + ";")
    tpl = entry.template
    lines.append(
        f"  domains [{' '.join(tpl.slots)}] self={tpl.slots[tpl.self_slot]};"
    )
    for card in entry.cardinalities:
        name = tpl.slots[card.slot]
        if (card.min, card.max) == (1, 1):
            lines.append(f"  card {name} = 1;")
        elif (card.min, card.max) == (0, 1):
            lines.append(f"  card {name} <= 1;")
        else:
            lines.append(f"  card {name} >= 1;")
    for req in entry.domain_features:
        lines.append(
            f"  feat {tpl.slots[req.slot]} {_render_feats(req.required)};"
        )
    for pred in entry.predicates:
        if pred.kind == SELF_VS_ALL:
            lines.append(
                f"  order {pred.render()} in {tpl.slots[tpl.self_slot]};"
            )
        else:
            lines.append(f"  order {pred.render()};")
    lines.append("}")
    return lines


# ---------------------------------------------------------------------------
# bundled fragment


def reference_lexicon_text() -> str:
    """Source text of the bundled German declarative-clause fragment."""
    return (
        resources.files("odgrammar").joinpath("data/de_fragment.lex").read_text()
    )


@lru_cache(maxsize=1)
def reference_lexicon() -> Lexicon:
    return load_lexicon(reference_lexicon_text())
