"""Artifact contents as they flow through verification and invocation.

A Content pairs raw bytes with the language they were read under; for
term-based languages the parsed term is carried too, and bytes written
back are always the canonical serialization of that term.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .model import is_term_lang
from .terms import Term, read_term, write_unit

_UNSET = object()


@dataclass
class Content:
    lang: Optional[Term]
    data: bytes
    _parsed: object = field(default=_UNSET, repr=False, compare=False)

    @classmethod
    def from_bytes(cls, data: bytes, lang: Optional[Term] = None) -> "Content":
        return cls(lang, data)

    @classmethod
    def from_text(cls, text: str, lang: Optional[Term] = None) -> "Content":
        return cls(lang, text.encode("utf-8"))

    @classmethod
    def from_term(cls, term: Term, lang: Optional[Term] = None) -> "Content":
        return cls(lang, write_unit(term).encode("utf-8"), term)

    def text(self) -> str:
        return self.data.decode("utf-8")

    def term(self) -> Term:
        """Parse the bytes as a single term unit (cached)."""
        if self._parsed is _UNSET:
            self._parsed = read_term(self.data.decode("utf-8"))
        return self._parsed

    def with_lang(self, lang: Term) -> "Content":
        return Content(lang, self.data, self._parsed)


def read_content(path: Path, lang: Optional[Term]) -> Content:
    """Read an artifact; term-based languages are parsed eagerly."""
    data = path.read_bytes()
    c = Content(lang, data)
    if lang is not None and is_term_lang(lang):
        c.term()
    return c
