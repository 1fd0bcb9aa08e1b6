"""Rule-based instruction parser.

Produces the task-candidate filter (task verbs), the target-name filter and
the color attribute filter from a transcribed instruction. Instead of a
dependency parse, a positional grammar is used: the target is the first
object noun after the first task verb, and the attribute is the first color
word between the two.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from .demo import Color
from .exceptions import ConfigError, NoTargetObject, NoTaskVerb

PRONOUNS = frozenset({"it", "them"})

_PUNCT = re.compile(r"[^\w\s]|_")


@dataclass(frozen=True)
class VerbEntry:
    canonical: str
    variants: Tuple[str, ...]


@dataclass(frozen=True)
class Lexicons:
    task_verbs: Tuple[VerbEntry, ...]
    object_nouns: frozenset
    # fixed, not configurable
    color_names: Tuple[str, ...] = field(default=tuple(c.value for c in Color), init=False)

    def __post_init__(self):
        canon = [v.canonical for v in self.task_verbs]
        if len(set(canon)) != len(canon):
            raise ConfigError("canonical verb forms must be unique")
        seen = {}
        for entry in self.task_verbs:
            if not entry.variants:
                raise ConfigError(f"verb {entry.canonical!r} has no variants")
            for var in entry.variants:
                key = tuple(tokenize(var))
                if not key:
                    raise ConfigError(f"empty variant for verb {entry.canonical!r}")
                if seen.setdefault(key, entry.canonical) != entry.canonical:
                    raise ConfigError(f"variant {var!r} maps to two verbs")
        if not self.object_nouns:
            raise ConfigError("object lexicon is empty")

    def to_dict(self) -> dict:
        return {
            "task_verbs": [{"canonical": v.canonical, "variants": list(v.variants)} for v in self.task_verbs],
            "object_nouns": sorted(self.object_nouns),
        }

    @classmethod
    def from_dict(cls, doc) -> "Lexicons":
        if not isinstance(doc, dict):
            raise ConfigError("lexicon document must be an object")
        unknown = set(doc) - {"task_verbs", "object_nouns"}
        if unknown:
            raise ConfigError(f"unknown lexicon keys {sorted(unknown)} (the color set is fixed)")
        try:
            verbs = tuple(
                VerbEntry(str(v["canonical"]).lower(), tuple(str(s).lower() for s in v["variants"]))
                for v in doc["task_verbs"]
            )
            nouns = frozenset(" ".join(tokenize(str(n))) for n in doc["object_nouns"])
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed lexicon document: {exc}") from None
        return cls(task_verbs=verbs, object_nouns=nouns)


def load_lexicons(document) -> Lexicons:
    try:
        return Lexicons.from_dict(json.loads(document))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"lexicon document is not JSON: {exc}") from None


DEFAULT_OBJECT_NOUNS = frozenset({
    # YCB subset
    "apple", "banana", "chips can", "cracker box", "gelatin box", "potted meat can",
    "pitcher", "bleach cleanser", "bowl", "cup",
    # household detector classes
    "dish", "plastic bottle", "mug", "bottle", "fridge", "refrigerator", "door",
    "drawer", "shelf", "table", "sponge", "spoon", "fork", "knife", "glass",
})


def default_lexicons() -> Lexicons:
    verbs = (
        VerbEntry("pick", ("pick", "pick up", "picks", "picks up", "picked", "picked up", "grab", "take")),
        VerbEntry("place", ("place", "places", "placed")),
        VerbEntry("put", ("put", "puts", "put down")),
        VerbEntry("lift", ("lift", "lifts", "lift up", "lifted")),
        VerbEntry("open", ("open", "opens", "opened")),
        VerbEntry("close", ("close", "closes", "closed", "shut")),
    )
    return Lexicons(task_verbs=verbs, object_nouns=DEFAULT_OBJECT_NOUNS)


def tokenize(transcript: str) -> list:
    """Lowercase, replace punctuation by whitespace and split."""
    return _PUNCT.sub(" ", transcript.lower()).split()


@dataclass(frozen=True)
class InstructionFoa:
    verbs: Tuple[str, ...]
    target_name: str
    attribute: Optional[Color] = None
    # nouns after later verbs; diagnostics only
    other_objects: Tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "verbs": list(self.verbs),
            "target_name": self.target_name,
            "attribute": None if self.attribute is None else self.attribute.value,
            "other_objects": list(self.other_objects),
        }

    @classmethod
    def from_dict(cls, d) -> "InstructionFoa":
        return cls(
            verbs=tuple(d["verbs"]),
            target_name=d["target_name"],
            attribute=None if d["attribute"] is None else Color(d["attribute"]),
            other_objects=tuple(d.get("other_objects", ())),
        )


def _phrase_table(phrases):
    # longest phrases first so multiword entries win at the same position
    table = [(tuple(p.split()), value) for p, value in phrases]
    table.sort(key=lambda item: -len(item[0]))
    return table


def _match(tokens: Sequence[str], i: int, table):
    for words, value in table:
        if tuple(tokens[i:i + len(words)]) == words:
            return value, len(words)
    return None, 0


def parse_instruction(transcript: str, lex: Optional[Lexicons] = None) -> InstructionFoa:
    """Extract task verbs, target object and color attribute.

    Raises ``NoTaskVerb`` when no lexicon verb occurs and ``NoTargetObject``
    when no object noun follows any verb.
    """
    lex = lex or default_lexicons()
    tokens = tokenize(transcript)
    verb_table = _phrase_table(
        (" ".join(tokenize(var)), entry.canonical) for entry in lex.task_verbs for var in entry.variants
    )
    noun_table = _phrase_table((n, n) for n in lex.object_nouns)
    colors = set(lex.color_names)

    verbs = []
    target = None
    attribute = None
    others = []
    first_verb_end = None
    i = 0
    while i < len(tokens):
        verb, n = _match(tokens, i, verb_table)
        if verb is not None:
            if verb not in verbs:
                verbs.append(verb)
            if first_verb_end is None:
                first_verb_end = i + n
            i += n
            continue
        noun, n = _match(tokens, i, noun_table)
        if noun is not None and first_verb_end is not None:
            if target is None:
                target = noun
                between = tokens[first_verb_end:i]
                attribute = next((Color(w) for w in between if w in colors), None)
            elif noun != target and noun not in others:
                others.append(noun)
            i += n
            continue
        # pronouns after a later verb refer back to the target; nothing to record
        i += 1

    if not verbs:
        raise NoTaskVerb(f"no task verb in {transcript!r}")
    if target is None:
        raise NoTargetObject(f"no target object after a task verb in {transcript!r}")
    return InstructionFoa(verbs=tuple(verbs), target_name=target, attribute=attribute,
                          other_objects=tuple(others))
