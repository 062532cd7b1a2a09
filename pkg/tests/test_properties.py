"""Randomized cross-checks of the validators, serialization, and tokenizer.

The heavyweight comparison here is validator agreement: the library's
verdict against the independent re-implementation in harness.py, over
seeded random structures.  The acceptance suite runs the frozen-seed
variant of the same trial; this module uses different seeds and smaller
counts to widen coverage without repeating that work.
"""

import random

import pytest

from odgrammar import (
    DependencyStructure,
    DependencyTree,
    OrderDomainStructure,
    load_lexicon,
    parse,
    parse_structure_json,
    parse_structure_text,
    render_structure_json,
    render_structure_text,
    structure_is_valid,
    surface_order,
    validate_structure,
)
from odgrammar.cli import tokenize

from corpus import NOUN_ROOT_LEXICON
from harness import (
    StructureSampler,
    grammatical_bases,
    independent_verdict,
    run_agreement_trial,
)
from test_constraints import bad_mittelfeld, fronted_participle


class TestValidatorAgreement:
    def test_random_instances(self, lex):
        stats = run_agreement_trial(3000, seed=97, bases=grammatical_bases())
        assert stats["compared"] == 3000
        assert stats["mismatches"] == []
        assert stats["valid"] >= 300
        assert stats["invalid"] >= 1500

    def test_small_lexicon_instances(self):
        nlex = load_lexicon(NOUN_ROOT_LEXICON)
        bases = (
            parse(["der", "Junge"], nlex).structures
            + parse(["Junge"], nlex).structures
        )
        assert len(bases) == 2
        stats = run_agreement_trial(1500, seed=13, lex=nlex, bases=bases)
        assert stats["compared"] == 1500
        assert stats["mismatches"] == []
        assert stats["valid"] >= 150

    def test_known_fixtures(self, lex, key_structure):
        cases = [
            (key_structure, True),
            (fronted_participle(lex), True),
            (bad_mittelfeld(lex), False),
            (
                DependencyStructure(
                    tree=DependencyTree((), 0, (), {}),
                    features={},
                    domains=OrderDomainStructure((), {}),
                    positional={},
                ),
                False,
            ),
        ]
        for ds, expected in cases:
            assert structure_is_valid(ds, lex) is expected
            assert independent_verdict(ds, lex) is expected


@pytest.fixture(scope="module")
def realizations(lex):
    sampler = StructureSampler(seed=5, lex=lex)
    out = []
    while len(out) < 250:
        ds = sampler.random_realization()
        if ds is not None:
            out.append(ds)
    return out


class TestSerializationRoundTrip:
    def test_text_round_trip(self, lex, realizations):
        for ds in realizations:
            assert parse_structure_text(render_structure_text(ds, lex), lex) == ds

    def test_json_round_trip(self, lex, realizations):
        for ds in realizations:
            assert parse_structure_json(render_structure_json(ds, lex), lex) == ds


class TestVerdictConsistency:
    def test_shortcut_equals_full_report(self, lex):
        sampler = StructureSampler(seed=31, lex=lex, bases=grammatical_bases())
        for _ in range(400):
            ds = sampler.next_instance()
            if ds is None:
                continue
            assert structure_is_valid(ds, lex) == validate_structure(ds, lex).ok

    def test_valid_structures_keep_index_order(self, lex):
        sampler = StructureSampler(seed=71, lex=lex, bases=grammatical_bases())
        seen_valid = 0
        for _ in range(1500):
            ds = sampler.next_instance()
            if ds is None or not structure_is_valid(ds, lex):
                continue
            seen_valid += 1
            assert surface_order(ds) == tuple(range(ds.tree.n))
        assert seen_valid >= 50


class TestTokenizeProperties:
    def test_period_handling_is_uniform(self):
        rng = random.Random(8)
        letters = "abcdefgh"
        for _ in range(300):
            toks = [
                "".join(rng.choice(letters) for _ in range(rng.randint(1, 5)))
                for _ in range(rng.randint(1, 6))
            ]
            plain = " ".join(toks)
            assert tokenize(plain) == toks
            assert tokenize(plain + " .") == toks
            assert tokenize(plain + ".") == toks

    def test_whitespace_runs_are_collapsed(self):
        rng = random.Random(9)
        for _ in range(100):
            toks = ["w%d" % i for i in range(rng.randint(1, 5))]
            sep = lambda: rng.choice([" ", "  ", "\t", " \t ", "\n"])
            text = sep().join(toks) + rng.choice(["", " ", "\n"])
            assert tokenize(text) == toks
