"""Personalized password-candidate generation.

Base tokens come from the cleaning/ranking pipeline; mutations are case
variants, all-at-once leet substitution, suffixes (including a year range),
and pairwise combination. Output is a plain one-candidate-per-line file
consumable by brute-force tools.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import EmptyTokenSet, SinkError

CASE_ORDER = ("lower", "capitalized", "upper")

_LEET = str.maketrans({"a": "4", "e": "3", "i": "1", "o": "0", "s": "5"})

DEFAULT_MAX_CANDIDATES = 100_000


@dataclass(frozen=True)
class WordlistConfig:
    case_variants: tuple[str, ...] = CASE_ORDER
    leet: bool = False
    suffixes: tuple[str, ...] = ("", "123", "!")
    year_from: int | None = None
    year_to: int | None = None
    combine_depth: int = 1
    max_candidates: int = DEFAULT_MAX_CANDIDATES

    def __post_init__(self):
        if not self.case_variants:
            raise ValueError("case_variants must be non-empty")
        unknown = set(self.case_variants) - set(CASE_ORDER)
        if unknown:
            raise ValueError(f"unknown case variants: {sorted(unknown)}")
        if self.combine_depth not in (1, 2):
            raise ValueError(f"combine_depth must be 1 or 2, got {self.combine_depth}")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be >= 1")
        if (self.year_from is None) != (self.year_to is None):
            raise ValueError("year_from and year_to must be set together")
        if self.year_from is not None and self.year_from > self.year_to:
            raise ValueError("year_from must not exceed year_to")

    def effective_suffixes(self) -> tuple[str, ...]:
        years: tuple[str, ...] = ()
        if self.year_from is not None:
            years = tuple(str(y) for y in range(self.year_from, self.year_to + 1))
        return self.suffixes + years

    def fingerprint(self, base_tokens: list[str]) -> str:
        payload = json.dumps(
            {
                "tokens": base_tokens,
                "case": list(self.case_variants),
                "leet": self.leet,
                "suffixes": list(self.effective_suffixes()),
                "depth": self.combine_depth,
                "max": self.max_candidates,
            },
            ensure_ascii=False,
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Wordlist:
    candidates: tuple[str, ...]
    config_fingerprint: str


def _apply_case(token: str, variant: str) -> str:
    if variant == "lower":
        return token.lower()
    if variant == "capitalized":
        return token[:1].upper() + token[1:].lower()
    return token.upper()


def _dedup_tokens(base_tokens: Iterable[str]) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for token in base_tokens:
        key = token.lower()
        if key not in seen:
            seen.add(key)
            out.append(token)
    return out


def _iter_candidates(bases: list[str], config: WordlistConfig) -> Iterator[str]:
    """Raw generation order: bases in rank order, then ordered pairs; per
    unit: case variants x leet off/on x suffixes."""
    units = list(bases)
    if config.combine_depth == 2:
        for i, a in enumerate(bases):
            for j, b in enumerate(bases):
                if i != j:
                    units.append(a + b)
    leet_states = (False, True) if config.leet else (False,)
    suffixes = config.effective_suffixes()
    for unit in units:
        for variant in config.case_variants:
            cased = _apply_case(unit, variant)
            for leeted in leet_states:
                body = cased.translate(_LEET) if leeted else cased
                for suffix in suffixes:
                    yield body + suffix


def generate_wordlist(base_tokens: Iterable[str], config: WordlistConfig) -> Wordlist:
    """Deterministic candidate list: dedup preserves first occurrence,
    truncated at config.max_candidates."""
    bases = _dedup_tokens(base_tokens)
    if not bases:
        raise EmptyTokenSet("no base tokens to mutate")
    seen: set[str] = set()
    out: list[str] = []
    for candidate in _iter_candidates(bases, config):
        if candidate not in seen:
            seen.add(candidate)
            out.append(candidate)
            if len(out) >= config.max_candidates:
                break
    return Wordlist(tuple(out), config.fingerprint(bases))


def estimate_count(base_tokens: Iterable[str], config: WordlistConfig) -> int:
    """Exact post-dedup candidate count, ignoring the truncation cap."""
    bases = _dedup_tokens(base_tokens)
    if not bases:
        raise EmptyTokenSet("no base tokens to mutate")
    return len(set(_iter_candidates(bases, config)))


def write_wordlist(wordlist: Wordlist, sink: Union[str, os.PathLike, io.IOBase]) -> int:
    """UTF-8, one candidate per line, LF-terminated, no BOM. Returns bytes
    written; an empty list writes zero bytes."""
    data = "".join(c + "\n" for c in wordlist.candidates).encode("utf-8")
    try:
        if hasattr(sink, "write"):
            sink.write(data)
        else:
            with open(sink, "wb") as fh:
                fh.write(data)
    except OSError as exc:
        raise SinkError(str(exc)) from exc
    return len(data)
