import json

import pytest
from hypothesis import given, strategies as st

from verbal_foa.demo import Color
from verbal_foa.exceptions import ConfigError, NoTargetObject, NoTaskVerb
from verbal_foa.language import Lexicons, default_lexicons, load_lexicons, parse_instruction, tokenize


@pytest.mark.parametrize("text, tokens", [
    ("Pick up a red cup.", ["pick", "up", "a", "red", "cup"]),
    ("", []),
    ("Open   the FRIDGE", ["open", "the", "fridge"]),
    ("cup,bowl!", ["cup", "bowl"]),
])
def test_tokenize(text, tokens):
    assert tokenize(text) == tokens


def test_pick_and_place():
    foa = parse_instruction("Pick up a red cup and place it on the shelf")
    assert foa.verbs == ("pick", "place")
    assert foa.target_name == "cup"
    assert foa.attribute is Color.RED
    assert foa.other_objects == ("shelf",)


def test_open_the_fridge():
    foa = parse_instruction("Open the fridge")
    assert foa.verbs == ("open",)
    assert foa.target_name == "fridge"
    assert foa.attribute is None


def test_place_the_cup():
    foa = parse_instruction("Place the cup")
    assert (foa.verbs, foa.target_name, foa.attribute) == (("place",), "cup", None)


def test_no_verb():
    with pytest.raises(NoTaskVerb):
        parse_instruction("hello there")


def test_no_object():
    with pytest.raises(NoTargetObject):
        parse_instruction("pick it up")
    # object before the verb does not count
    with pytest.raises(NoTargetObject):
        parse_instruction("the cup, pick")


def test_multiword_verb_and_noun():
    foa = parse_instruction("Lift up the yellow potted meat can, then put it down")
    assert foa.verbs == ("lift", "put")
    assert foa.target_name == "potted meat can"
    assert foa.attribute is Color.YELLOW


def test_non_color_adjectives_skipped():
    foa = parse_instruction("pick the big shiny blue bowl")
    assert foa.attribute is Color.BLUE
    assert foa.target_name == "bowl"


def test_first_object_wins():
    foa = parse_instruction("pick the cup and the bowl")
    assert foa.target_name == "cup"
    assert foa.other_objects == ("bowl",)


def test_color_after_target_ignored():
    foa = parse_instruction("pick the cup that is red")
    assert foa.attribute is None


def test_custom_lexicons():
    lex = load_lexicons(json.dumps({
        "task_verbs": [{"canonical": "grab", "variants": ["grab", "grab hold of"]}],
        "object_nouns": ["Mug"],
    }))
    foa = parse_instruction("Grab hold of the green mug", lex)
    assert foa.verbs == ("grab",)
    assert foa.target_name == "mug"
    assert foa.attribute is Color.GREEN
    assert lex.color_names == tuple(c.value for c in Color)


@pytest.mark.parametrize("doc", [
    {"task_verbs": [], "object_nouns": ["cup"], "color_names": ["red"]},
    {"task_verbs": [{"canonical": "a", "variants": ["x"]}, {"canonical": "a", "variants": ["y"]}],
     "object_nouns": ["cup"]},
    {"task_verbs": [{"canonical": "a", "variants": ["x"]}, {"canonical": "b", "variants": ["x"]}],
     "object_nouns": ["cup"]},
    {"task_verbs": [{"canonical": "a"}], "object_nouns": ["cup"]},
])
def test_bad_lexicons(doc):
    with pytest.raises(ConfigError):
        Lexicons.from_dict(doc)


def test_lexicon_round_trip():
    lex = default_lexicons()
    assert Lexicons.from_dict(lex.to_dict()) == lex


WORDS = ["the", "a", "red", "blue", "big", "cup", "bowl", "pick", "place", "up", "it", "and",
         "open", "fridge", "on", "shelf", "white", "then"]


@given(st.lists(st.sampled_from(WORDS), max_size=12))
def test_parser_properties(words):
    text = " ".join(words)
    try:
        foa = parse_instruction(text)
    except (NoTaskVerb, NoTargetObject):
        return
    assert parse_instruction(text) == foa
    assert foa.attribute is None or isinstance(foa.attribute, Color)
    assert foa.verbs and foa.target_name in default_lexicons().object_nouns
    # verbs appear in order of first occurrence
    positions = [next(i for i, w in enumerate(words) if parse_verb(w) == v) for v in foa.verbs]
    assert positions == sorted(positions)


def parse_verb(word):
    for entry in default_lexicons().task_verbs:
        if word in entry.variants:
            return entry.canonical
    return None


@given(st.lists(st.sampled_from(WORDS), max_size=8))
def test_suffix_insensitivity(suffix):
    base = "pick up the red cup"
    foa = parse_instruction(base)
    longer = parse_instruction(base + " " + " ".join(suffix))
    assert (longer.target_name, longer.attribute) == (foa.target_name, foa.attribute)
