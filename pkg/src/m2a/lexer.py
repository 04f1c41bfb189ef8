from __future__ import annotations

import re
import unicodedata

from .diagnostics import M2AError, Span
from .syntax import Token

KEYWORDS = frozenset(
    """fmod endfm is sort sorts subsort subsorts op ops var vars eq ceq mb cmb
    protecting pr including inc extending ex if mod endm rl crl""".split()
)
PUNCTUATION = frozenset("()[]{},.")

_IDENT = re.compile(r"[A-Za-z0-9][A-Za-z0-9'\-]*")
_SCAN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>(?:---|\*\*\*)[^\n]*)
  | (?P<punct>[()\[\]{},])
  | (?P<word>[^\s()\[\]{},]+)
    """,
    re.VERBOSE,
)


class _Positions:
    """Maps character offsets to byte offsets and line/column pairs."""

    def __init__(self, source: str):
        self.line_starts = [0] + [m.end() for m in re.finditer("\n", source)]
        self.ascii = source.isascii()
        if not self.ascii:
            self.byte_at = [0]
            for ch in source:
                self.byte_at.append(self.byte_at[-1] + len(ch.encode("utf-8")))

    def span(self, start: int, end: int) -> Span:
        lo, hi = 0, len(self.line_starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.line_starts[mid] <= start:
                lo = mid
            else:
                hi = mid - 1
        col = start - self.line_starts[lo] + 1
        if self.ascii:
            return Span(start, end, lo + 1, col)
        return Span(self.byte_at[start], self.byte_at[end], lo + 1, col)


def _classify(text: str) -> str:
    if text in KEYWORDS:
        return "keyword"
    if text in PUNCTUATION:
        return "punctuation"
    if _IDENT.fullmatch(text):
        return "identifier"
    return "special-symbol"


def tokenize(source: str) -> list[Token]:
    """Split Maude source into tokens; `---` and `***` comments run to end of line."""
    pos = _Positions(source)
    for i, ch in enumerate(source):
        if unicodedata.category(ch) == "Cc" and ch not in "\t\n\r\f\v":
            raise M2AError.single("unterminated-token", f"stray control character U+{ord(ch):04X}", pos.span(i, i + 1))

    tokens: list[Token] = []
    for m in _SCAN.finditer(source):
        kind = m.lastgroup
        if kind in ("ws", "comment"):
            continue
        text = m.group()
        start, end = m.span()
        # a statement-final period glued to the preceding word ("Exp.")
        if kind == "word" and len(text) > 1 and text.endswith(".") and not text.endswith(".."):
            tokens.append(Token(_classify(text[:-1]), text[:-1], pos.span(start, end - 1)))
            tokens.append(Token("punctuation", ".", pos.span(end - 1, end)))
            continue
        tokens.append(Token(_classify(text), text, pos.span(start, end)))
    return tokens
