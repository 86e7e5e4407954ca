"""Token and named-entity extraction from collected texts.

The rule-based extractor is the always-available fallback; external NER
services plug in as adapters returning bare tokens that get span-resolved
against the original text. Cleaning and frequency ranking feed the wordlist
generator.
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Optional, Union

from .errors import AdapterUnavailable, SpanNotFound

PER, LOC, ORG, MISC = "PER", "LOC", "ORG", "MISC"

RULE_BASED = "rule"

_TOKEN_RE = re.compile(r"[@#]?\w+", re.UNICODE)
_SENTENCE_ENDERS = set(".!?")
_MIN_TOKEN_LEN = 3

# German capitalizes every noun; titles and address words directly before
# names are the worst over-taggers, so they are stopped out by default.
DEFAULT_TITLES = frozenset(
    {"frau", "herr", "herrn", "dr", "prof", "professor", "familie", "firma",
     "fräulein", "fraeulein"}
)


@dataclass(frozen=True)
class NamedEntity:
    surface: str
    klass: str
    start: int
    end: int
    source_node: Optional[str] = None

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class TokenStats:
    token: str  # casing of the first occurrence
    count: int
    first_seen: int  # index of the first occurrence in the input


class Gazetteer:
    """Word lists steering the rule-based extractor.

    given_names -> PER, cities -> LOC, org_suffixes mark the second token of
    an organization name, titles are capitalized non-entities (Frau, Herr, …)
    that would otherwise be over-tagged in German text.
    """

    def __init__(
        self,
        given_names: Iterable[str] = (),
        cities: Iterable[str] = (),
        org_suffixes: Iterable[str] = (),
        titles: Optional[Iterable[str]] = None,
    ):
        self.given_names = frozenset(w.lower() for w in given_names)
        self.cities = frozenset(w.lower() for w in cities)
        self.org_suffixes = frozenset(w.lower() for w in org_suffixes)
        self.titles = DEFAULT_TITLES if titles is None else frozenset(w.lower() for w in titles)

    @classmethod
    def from_dir(cls, directory: Union[str, Path]) -> "Gazetteer":
        directory = Path(directory)

        def load(name: str) -> set[str]:
            path = directory / f"{name}.txt"
            return load_gazetteer_file(path) if path.is_file() else set()

        titles_path = directory / "titles.txt"
        return cls(
            load("given_names"),
            load("cities"),
            load("org_suffixes"),
            load_gazetteer_file(titles_path) if titles_path.is_file() else None,
        )

    @classmethod
    def bundled(cls) -> "Gazetteer":
        root = resources.files("idrecon.data") / "gazetteers"
        with resources.as_file(root) as directory:
            return cls.from_dir(directory)

    def classify(self, token: str) -> Optional[str]:
        lowered = token.lower()
        if lowered in self.given_names:
            return PER
        if lowered in self.cities:
            return LOC
        return None


def load_gazetteer_file(path: Union[str, Path]) -> set[str]:
    """One lowercase term per line; lines starting with # are comments."""
    terms = set()
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            terms.add(line.lower())
    return terms


def extract_entities(
    text: str,
    backend: str = RULE_BASED,
    gazetteer: Optional[Gazetteer] = None,
    adapters: Optional[dict[str, Callable[[str], list[str]]]] = None,
    source_node: Optional[str] = None,
) -> list[NamedEntity]:
    """Named entities with character spans into the source text.

    Rule order for the built-in backend:
      (a) @mention / #hashtag tokens, sigil stripped, MISC unless the
          gazetteer reclassifies;
      (b) gazetteer matches: given names PER, cities LOC, a capitalized
          token followed by an org-suffix token forms one ORG span;
      (c) remaining capitalized tokens not at a sentence start and not in
          the titles list become MISC.

    External backends return bare tokens which are span-resolved here.
    """
    if not text:
        raise ValueError("text must be non-empty")
    if backend != RULE_BASED:
        if not adapters or backend not in adapters:
            raise AdapterUnavailable(f"no NER adapter registered as {backend!r}")
        return _resolve_adapter_tokens(
            adapters[backend](text), text, gazetteer or Gazetteer(), source_node
        )

    gaz = gazetteer if gazetteer is not None else Gazetteer.bundled()
    tokens = list(_TOKEN_RE.finditer(text))
    entities: list[NamedEntity] = []
    consumed: set[int] = set()
    prev_end: Optional[int] = None
    for i, match in enumerate(tokens):
        raw = match.group(0)
        sigil = raw[0] in "@#"
        word = raw[1:] if sigil else raw
        start = match.start() + (1 if sigil else 0)
        end = match.end()
        between = text[prev_end : match.start()] if prev_end is not None else None
        sentence_start = prev_end is None or any(c in _SENTENCE_ENDERS for c in between)
        prev_end = end
        if i in consumed or not word:
            continue
        if sigil:
            klass = gaz.classify(word) or MISC
            entities.append(NamedEntity(word, klass, start, end, source_node))
            continue
        klass = gaz.classify(word)
        if klass is not None:
            entities.append(NamedEntity(word, klass, start, end, source_node))
            continue
        if word[0].isupper() and i + 1 < len(tokens):
            nxt = tokens[i + 1]
            gap = text[match.end() : nxt.start()]
            if nxt.group(0).lower() in gaz.org_suffixes and gap.strip() == "":
                surface = text[start : nxt.end()]
                entities.append(NamedEntity(surface, ORG, start, nxt.end(), source_node))
                consumed.add(i + 1)
                continue
        if word[0].isupper() and not sentence_start and word.lower() not in gaz.titles:
            entities.append(NamedEntity(word, MISC, start, end, source_node))
    entities.sort(key=lambda e: e.start)
    return entities


def _resolve_adapter_tokens(
    tokens: list[str], text: str, gaz: Gazetteer, source_node: Optional[str]
) -> list[NamedEntity]:
    entities = []
    for token in tokens:
        try:
            start, end = resolve_span(token, text, 0)
        except SpanNotFound:
            continue  # adapter hallucinated a token; drop it
        surface = text[start:end]
        entities.append(NamedEntity(surface, gaz.classify(surface) or MISC, start, end, source_node))
    entities.sort(key=lambda e: e.start)
    return entities


def resolve_span(token: str, source: str, from_offset: int = 0) -> tuple[int, int]:
    """First case-insensitive whole-word occurrence at or after from_offset;
    whole-word means not flanked by letters."""
    if not token:
        raise ValueError("token must be non-empty")
    haystack = source.lower()
    needle = token.lower()
    pos = max(from_offset, 0)
    while True:
        idx = haystack.find(needle, pos)
        if idx < 0:
            raise SpanNotFound(f"{token!r} not found in source from offset {from_offset}")
        end = idx + len(needle)
        before_ok = idx == 0 or not source[idx - 1].isalpha()
        after_ok = end >= len(source) or not source[end].isalpha()
        if before_ok and after_ok:
            return (idx, end)
        pos = idx + 1


def clean_tokens(tokens: Iterable[str]) -> list[str]:
    """Strip #/@ sigils and surrounding punctuation, NFC-normalize, drop
    tokens shorter than 3 chars, dedup case-insensitively keeping the first
    casing and order. Idempotent."""
    seen: set[str] = set()
    out: list[str] = []
    for token in tokens:
        cleaned = unicodedata.normalize("NFC", token.lstrip("#@"))
        cleaned = _strip_punctuation(cleaned)
        if len(cleaned) < _MIN_TOKEN_LEN:
            continue
        key = cleaned.lower()
        if key not in seen:
            seen.add(key)
            out.append(cleaned)
    return out


def _strip_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def rank_tokens(tokens: Iterable[str]) -> list[TokenStats]:
    """Frequency ranking: counts aggregate case-insensitively, stored casing
    is the first occurrence; descending count, ties by ascending lowercase
    lexicographic order."""
    counts: Counter[str] = Counter()
    first_casing: dict[str, str] = {}
    first_seen: dict[str, int] = {}
    for i, token in enumerate(tokens):
        key = token.lower()
        counts[key] += 1
        if key not in first_casing:
            first_casing[key] = token
            first_seen[key] = i
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [TokenStats(first_casing[k], c, first_seen[k]) for k, c in ranked]
