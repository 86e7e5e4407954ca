"""Interpreter for wrapped-tool output.

External tools run as child processes and their stdout is captured as one
string. When a registration declares list output, that string is parsed back
into a list of values here. The grammar covers flat lists of quoted strings:

    list    := '[' ws (element (ws ',' ws element)* (ws ',')?)? ws ']'
    element := single- or double-quoted string with \\\\, \\' and \\" escapes

A trailing comma is accepted (tools that print literals tend to emit one),
nested structures are not.
"""

from __future__ import annotations

from .errors import ParseError

_WS = " \t\r\n"
_ESCAPES = {"\\": "\\", "'": "'", '"': '"'}


def interpret_list_output(text: str) -> list[str]:
    """Parse a bracketed, comma-separated list literal into its elements.

    Raises ParseError (with offset and reason) on unbalanced brackets,
    unterminated quotes, bad escapes, or bare unquoted tokens.
    """
    pos = _skip_ws(text, 0)
    if pos >= len(text) or text[pos] != "[":
        raise ParseError(pos, "expected opening bracket")
    pos += 1
    items: list[str] = []
    expecting_element = True
    while True:
        pos = _skip_ws(text, pos)
        if pos >= len(text):
            raise ParseError(pos, "unbalanced bracket")
        ch = text[pos]
        if ch == "]":
            if expecting_element and items:
                # trailing comma closed the list; tolerated
                pass
            pos += 1
            break
        if not expecting_element:
            if ch == ",":
                pos += 1
                expecting_element = True
                continue
            raise ParseError(pos, "expected comma or closing bracket")
        if ch in ("'", '"'):
            value, pos = _parse_quoted(text, pos)
            items.append(value)
            expecting_element = False
            continue
        raise ParseError(pos, "bare unquoted token")
    pos = _skip_ws(text, pos)
    if pos != len(text):
        raise ParseError(pos, "trailing data after list")
    return items


def serialize_list(items: list[str]) -> str:
    """Inverse of interpret_list_output: single quotes, \\ and ' escaped."""
    quoted = [
        "'" + item.replace("\\", "\\\\").replace("'", "\\'") + "'" for item in items
    ]
    return "[" + ", ".join(quoted) + "]"


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos] in _WS:
        pos += 1
    return pos


def _parse_quoted(text: str, pos: int) -> tuple[str, int]:
    quote = text[pos]
    start = pos
    pos += 1
    out: list[str] = []
    while pos < len(text):
        ch = text[pos]
        if ch == "\\":
            if pos + 1 >= len(text):
                raise ParseError(pos, "dangling escape")
            nxt = text[pos + 1]
            if nxt not in _ESCAPES:
                raise ParseError(pos, f"unsupported escape \\{nxt}")
            out.append(_ESCAPES[nxt])
            pos += 2
            continue
        if ch == quote:
            return "".join(out), pos + 1
        out.append(ch)
        pos += 1
    raise ParseError(start, "unterminated quote")
