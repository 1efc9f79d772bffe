"""CoNLL parsing and emission, relabeling, splitting, entity-level scoring."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fstner.corpus import (AlignmentError, ConllFormatError, TagAlphabet,
                           bio_violations, entity_spans, evaluate,
                           format_report, is_punctuation_token, parse_conll,
                           read_token_lines, relabel_for_training,
                           split_corpus, write_conll)

ALPHA = TagAlphabet()


class TestTagAlphabet:
    def test_ordering_and_contents(self):
        assert ALPHA.symbols[:9] == ("B-PER", "I-PER", "B-ORG", "I-ORG",
                                     "B-LOC", "I-LOC", "B-MISC", "I-MISC",
                                     "O")
        assert ALPHA.symbols[9] == "PUNCT"
        assert "TRIG_de" in ALPHA.symbols
        assert "TRIG_según" in ALPHA.symbols
        assert len(set(ALPHA.symbols)) == len(ALPHA.symbols)

    def test_predicates(self):
        assert ALPHA.is_bio("O") and ALPHA.is_bio("B-PER")
        assert not ALPHA.is_bio("PUNCT")
        assert ALPHA.is_entity_tag("I-MISC")
        assert not ALPHA.is_entity_tag("O")
        assert ALPHA.is_trigger_tag("TRIG_en")
        assert not ALPHA.is_trigger_tag("TRIG_nope")

    def test_output_mapping(self):
        assert ALPHA.output_tag("TRIG_de") == "O"
        assert ALPHA.output_tag("PUNCT") == "O"
        assert ALPHA.output_tag("B-LOC") == "B-LOC"

    def test_custom_triggers(self):
        alpha = TagAlphabet(triggers=("a", "bajo"))
        assert alpha.trigger_tags == ("TRIG_a", "TRIG_bajo")


def test_is_punctuation_token():
    assert is_punctuation_token(",")
    assert is_punctuation_token("...")
    assert is_punctuation_token("¡!")
    assert not is_punctuation_token("a.")
    assert not is_punctuation_token("")


class TestParseConll:
    def test_basic(self):
        corpus = parse_conll("Madrid B-LOC\n.\tO\n\n")
        assert corpus == [[("Madrid", "B-LOC"), (".", "O")]]

    def test_multiple_sentences_and_no_trailing_newline(self):
        corpus = parse_conll("a O\n\nb O\nc B-PER")
        assert len(corpus) == 2
        assert corpus[1] == [("b", "O"), ("c", "B-PER")]

    def test_docstart_skipped(self):
        corpus = parse_conll("-DOCSTART- O\n\na O\n")
        assert corpus == [[("a", "O")]]

    def test_one_column_line_rejected_with_line_number(self):
        with pytest.raises(ConllFormatError, match="line 2"):
            parse_conll("a O\nfoo\n")

    def test_unknown_tag_rejected(self):
        with pytest.raises(ConllFormatError, match="B-GPE"):
            parse_conll("a B-GPE\n")

    def test_empty_input_rejected(self):
        with pytest.raises(ConllFormatError):
            parse_conll("")
        with pytest.raises(ConllFormatError):
            parse_conll("\n\n\n")

    def test_round_trip_random_corpora(self):
        rng = random.Random(44)
        words = ["a", "b", "Ciudad", "de", ",", "x1", "café"]
        for _ in range(25):
            corpus = [[(rng.choice(words), rng.choice(ALPHA.bio_tags))
                       for _ in range(rng.randint(1, 8))]
                      for _ in range(rng.randint(1, 10))]
            assert parse_conll(write_conll(corpus)) == corpus

    @given(st.lists(st.lists(
        st.tuples(st.sampled_from(["tok", "Dos", "x"]),
                  st.sampled_from(ALPHA.bio_tags)),
        min_size=1, max_size=5), min_size=1, max_size=5))
    @settings(max_examples=40)
    def test_round_trip_property(self, corpus):
        corpus = [[tuple(tok) for tok in sent] for sent in corpus]
        assert parse_conll(write_conll(corpus)) == corpus


class TestWriteConll:
    def test_empty_corpus(self):
        assert write_conll([]) == ""

    def test_residual_tags_mapped_to_outside(self):
        text = write_conll([[("de", "TRIG_de"), (",", "PUNCT"),
                             ("Lima", "B-LOC")]])
        assert text == "de O\n, O\nLima B-LOC\n"


def test_read_token_lines_lenient():
    assert read_token_lines("") == []
    assert read_token_lines("a O\nb\n\nc I-LOC\n") == [["a", "b"], ["c"]]


class TestRelabel:
    def test_trigger_word_outside_entity(self):
        out = relabel_for_training([[("de", "O")]], ALPHA)
        assert out == [[("de", "TRIG_de")]]

    def test_trigger_word_inside_entity_untouched(self):
        out = relabel_for_training([[("de", "I-ORG")]], ALPHA)
        assert out == [[("de", "I-ORG")]]

    def test_punctuation(self):
        out = relabel_for_training([[(",", "O")]], ALPHA)
        assert out == [[(",", "PUNCT")]]

    def test_never_alters_entity_tags(self):
        rng = random.Random(3)
        words = ["de", "en", ",", ".", "casa", "Lima"]
        corpus = [[(rng.choice(words), rng.choice(ALPHA.bio_tags))
                   for _ in range(6)] for _ in range(30)]
        out = relabel_for_training(corpus, ALPHA)
        for sent, relabeled in zip(corpus, out):
            for (w, tag), (w2, new) in zip(sent, relabeled):
                assert w == w2
                if tag != "O":
                    assert new == tag


class TestSplit:
    def test_fraction(self):
        corpus = [[("x", "O")] for _ in range(100)]
        a, b = split_corpus(corpus, 0.85)
        assert (len(a), len(b)) == (85, 15)

    def test_minimum_one_sentence_each(self):
        corpus = [[("x", "O")], [("y", "O")]]
        a, b = split_corpus(corpus, 0.99)
        assert (len(a), len(b)) == (1, 1)

    def test_partition(self):
        corpus = [[(f"w{i}", "O")] for i in range(17)]
        a, b = split_corpus(corpus, 0.6)
        assert a + b == corpus

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            split_corpus([[("x", "O")]], 0.5)

    def test_bad_fraction_rejected(self):
        corpus = [[("x", "O")], [("y", "O")]]
        for f in (0.0, 1.0, -1, 2):
            with pytest.raises(ValueError):
                split_corpus(corpus, f)


class TestEntitySpans:
    def test_basic(self):
        tags = ["B-PER", "I-PER", "O", "B-LOC"]
        assert entity_spans(tags) == [("PER", 0, 2), ("LOC", 3, 4)]

    def test_orphan_continuation_starts_entity(self):
        assert entity_spans(["O", "I-LOC", "I-LOC"]) == [("LOC", 1, 3)]

    def test_type_change_splits(self):
        assert entity_spans(["B-PER", "I-LOC"]) \
            == [("PER", 0, 1), ("LOC", 1, 2)]

    def test_adjacent_entities(self):
        assert entity_spans(["B-PER", "B-PER"]) \
            == [("PER", 0, 1), ("PER", 1, 2)]


def corpus_from(*tag_rows):
    return [[(f"w{i}", tag) for i, tag in enumerate(row)]
            for row in tag_rows]


class TestEvaluate:
    def test_perfect(self):
        c = corpus_from(["B-PER", "I-PER", "O"], ["O", "B-LOC"])
        report = evaluate(c, c)
        assert report.overall.precision == report.overall.recall == 1.0
        assert report.overall.f1 == 1.0

    def test_boundary_mismatch_scores_zero(self):
        gold = corpus_from(["B-PER", "I-PER", "O"])
        pred = corpus_from(["B-PER", "O", "O"])
        report = evaluate(pred, gold)
        assert report.overall.precision == 0.0
        assert report.overall.recall == 0.0
        assert report.overall.f1 == 0.0

    def test_hand_computed_three_entities(self):
        gold = corpus_from(["B-PER", "I-PER", "O", "B-LOC"], ["B-ORG", "O"])
        pred = corpus_from(["B-PER", "I-PER", "O", "B-ORG"], ["B-ORG", "O"])
        report = evaluate(pred, gold)
        assert report.overall.correct == 2
        assert report.overall.predicted == 3
        assert report.overall.gold == 3
        assert report.overall.precision == pytest.approx(2 / 3)
        assert report.by_type["PER"].f1 == 1.0
        assert report.by_type["LOC"].recall == 0.0
        assert report.by_type["ORG"].precision == pytest.approx(0.5)

    def test_spurious_entity_lowers_precision_not_recall(self):
        gold = corpus_from(["B-PER", "O", "O"])
        pred_good = corpus_from(["B-PER", "O", "O"])
        pred_extra = corpus_from(["B-PER", "O", "B-LOC"])
        good = evaluate(pred_good, gold)
        extra = evaluate(pred_extra, gold)
        assert extra.overall.precision < good.overall.precision
        assert extra.overall.recall == good.overall.recall

    def test_misalignment_rejected(self):
        gold = corpus_from(["O", "O"])
        with pytest.raises(AlignmentError):
            evaluate(corpus_from(["O"]), gold)
        with pytest.raises(AlignmentError):
            evaluate(corpus_from(["O", "O"], ["O"]), gold)

    def test_token_count(self):
        gold = corpus_from(["O", "O"], ["B-PER"])
        assert evaluate(gold, gold).token_count == 3


def test_format_report_header_and_digits():
    gold = corpus_from(["B-PER", "I-PER", "O", "B-LOC"], ["B-ORG", "O"])
    pred = corpus_from(["B-PER", "I-PER", "O", "B-ORG"], ["B-ORG", "O"])
    text = format_report(evaluate(pred, gold))
    assert "precision recall F1" in text
    assert "overall" in text
    assert "66.7" in text  # overall P/R with one decimal


def test_bio_violations():
    corpus = corpus_from(["O", "I-LOC"], ["B-PER", "I-PER"])
    assert bio_violations(corpus) == [(0, 1, "I-LOC")]
