import ast
import random
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idrecon.errors import ParseError
from idrecon.interpret import interpret_list_output, serialize_list


class TestBasics:
    def test_simple_list(self):
        assert interpret_list_output("['a', 'b']") == ["a", "b"]

    def test_empty_list(self):
        assert interpret_list_output("[]") == []

    def test_double_quotes(self):
        assert interpret_list_output('["x", "y"]') == ["x", "y"]

    def test_mixed_quotes_and_escapes(self):
        # cross-checked against Python's own literal evaluator before freezing
        text = "['it\\'s', \"x,y\"]"
        expected = ["it's", "x,y"]
        assert ast.literal_eval(text) == expected
        assert interpret_list_output(text) == expected

    def test_whitespace_tolerated(self):
        assert interpret_list_output("  [ 'a' ,\n\t'b' ]  ") == ["a", "b"]

    def test_trailing_comma(self):
        assert interpret_list_output("['a', 'b',]") == ["a", "b"]

    def test_backslash_escape(self):
        assert interpret_list_output(r"['a\\b']") == ["a\\b"]

    def test_escaped_double_quote_in_double_quotes(self):
        assert interpret_list_output('["say \\"hi\\""]') == ['say "hi"']

    def test_quote_of_other_style_unescaped(self):
        assert interpret_list_output("[\"it's\"]") == ["it's"]


class TestErrors:
    @pytest.mark.parametrize(
        "text,position",
        [
            ("[a,", 1),  # bare token
            ("", 0),
            ("x", 0),
            ("['a'", 4),  # unbalanced
            ("['a", 1),  # unterminated quote (opened at 1)
            ("['a' 'b']", 5),  # missing comma
            ("['a'] junk", 6),
            ("['a\\x']", 3),  # unsupported escape
            ("['a',", 5),
        ],
    )
    def test_parse_errors_carry_position(self, text, position):
        with pytest.raises(ParseError) as exc:
            interpret_list_output(text)
        assert exc.value.position == position

    def test_bare_token_reason(self):
        with pytest.raises(ParseError) as exc:
            interpret_list_output("[a,")
        assert "bare" in exc.value.reason


class TestSerialize:
    def test_round_trip_examples(self):
        for items in ([], ["a"], ["it's"], ["a\\b", "c,d"], ["ä ö"], ['"double"']):
            assert interpret_list_output(serialize_list(items)) == items

    def test_serialized_matches_python_literal(self):
        items = ["plain", "it's", "back\\slash"]
        assert ast.literal_eval(serialize_list(items)) == items


@settings(max_examples=300, deadline=None)
@given(st.lists(st.text(max_size=30)))
def test_round_trip_property(items):
    assert interpret_list_output(serialize_list(items)) == items


def test_round_trip_bulk_seeded():
    """Big deterministic corpus, heavier on escapes than hypothesis defaults."""
    rng = random.Random(0xC0FFEE)
    alphabet = string.ascii_letters + string.digits + "\\'\" ,[]{}#@äöüß"
    for _ in range(2000):
        items = [
            "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 20)))
            for _ in range(rng.randrange(0, 8))
        ]
        assert interpret_list_output(serialize_list(items)) == items


def test_malformed_corpus_never_crashes():
    rng = random.Random(7)
    corpus = ["[", "]", "[']", "['a'b']", "[,]", "['a' ,, 'b']", "[''''", "[\"]"]
    for _ in range(500):
        corpus.append("".join(rng.choice("['\\],\"ax ") for _ in range(rng.randrange(1, 15))))
    for text in corpus:
        try:
            interpret_list_output(text)
        except ParseError:
            pass  # the only acceptable failure mode
