"""Deterministic identity-candidate generation.

Email candidates follow the eight corporate-convention patterns; username
candidates follow the namecombiner-style rule set. Both operate on folded
name parts (lowercase ASCII, German umlauts transliterated) so the output is
directly usable as probe input.
"""

from __future__ import annotations

import string
import unicodedata
from dataclasses import dataclass, field

from .errors import EmptyAfterFold, InvalidDomain

_GERMAN_MAP = {"ä": "ae", "ö": "oe", "ü": "ue", "ß": "ss"}
_KEEP = set(string.ascii_lowercase + string.digits)

# Fixed, ordered email pattern set; output order follows this list.
EMAIL_PATTERNS = (
    "{first}.{last}",
    "{first}{last}",
    "{f}{last}",
    "{f}.{last}",
    "{first}_{last}",
    "{last}.{first}",
    "{first}",
    "{last}",
)

USERNAME_SEPARATORS = ("", ".", "_", "-")


@dataclass(frozen=True)
class NameParts:
    """A person's name split for candidate generation; extras are appended
    verbatim (typically a birth year)."""

    first: str
    last: str
    extras: tuple[str, ...] = field(default=())


def fold_name(text: str) -> str:
    """Lowercase, transliterate German umlauts (ä→ae ...), strip other
    diacritics to base letters, drop everything outside [a-z0-9]."""
    lowered = text.lower()
    translit = "".join(_GERMAN_MAP.get(c, c) for c in lowered)
    decomposed = unicodedata.normalize("NFKD", translit)
    base = "".join(c for c in decomposed if not unicodedata.combining(c))
    folded = "".join(c for c in base if c in _KEEP)
    if not folded:
        raise EmptyAfterFold(f"nothing left of {text!r} after folding")
    return folded


def is_valid_domain(domain: str) -> bool:
    """Dot-separated non-empty labels, LDH (letters/digits/hyphen) only,
    no hyphen at a label edge."""
    if not domain:
        return False
    for label in domain.lower().split("."):
        if not label or label.startswith("-") or label.endswith("-"):
            return False
        if any(c not in _KEEP and c != "-" for c in label):
            return False
    return True


def validate_email_syntax(text: str) -> bool:
    """Syntax-only verdict: local@domain, local over [a-z0-9._%+-]+ after
    case folding, no empty parts, no double/leading/trailing dots."""
    candidate = text.lower()
    if candidate.count("@") != 1:
        return False
    local, domain = candidate.split("@")
    if not local or not is_valid_domain(domain):
        return False
    allowed = _KEEP | set("._%+-")
    if any(c not in allowed for c in local):
        return False
    if local.startswith(".") or local.endswith(".") or ".." in local:
        return False
    return True


def generate_email_candidates(name: NameParts, domain: str) -> list[str]:
    """Instantiate the eight-pattern table with folded name parts; dedup
    preserves first occurrence. Every output is syntax-valid."""
    if not is_valid_domain(domain):
        raise InvalidDomain(f"not a valid domain: {domain!r}")
    first = fold_name(name.first)
    last = fold_name(name.last)
    fields = {"first": first, "last": last, "f": first[0], "l": last[0]}
    seen: set[str] = set()
    out: list[str] = []
    for pattern in EMAIL_PATTERNS:
        address = pattern.format(**fields) + "@" + domain.lower()
        if address not in seen:
            seen.add(address)
            out.append(address)
    return out


def generate_username_candidates(name: NameParts) -> list[str]:
    """Namecombiner-style candidates, deterministic order:

    both orders of (first, last) joined by each of "", ".", "_", "-";
    then initial+last and first+initial; then each part alone; then each of
    the preceding suffixed with each extra. Dedup preserves first occurrence.
    """
    first = fold_name(name.first)
    last = fold_name(name.last)
    base: list[str] = []
    for a, b in ((first, last), (last, first)):
        for sep in USERNAME_SEPARATORS:
            base.append(a + sep + b)
    base.append(first[0] + last)
    base.append(first + last[0])
    base.append(first)
    base.append(last)
    candidates = list(base)
    for extra in name.extras:
        suffix = fold_name(str(extra))
        candidates.extend(c + suffix for c in base)
    seen: set[str] = set()
    out: list[str] = []
    for c in candidates:
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out
