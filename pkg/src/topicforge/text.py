"""Label normalization shared by duplicate detection, coverage, and alignment."""

from __future__ import annotations

import re
import unicodedata

_PAREN_RE = re.compile(r"\([^()]*\)")
_WS_RE = re.compile(r"\s+")


def normalize_label(text: str) -> str:
    """Case-fold, strip diacritics, drop parenthetical qualifiers, collapse whitespace."""
    text = _PAREN_RE.sub(" ", text)
    text = unicodedata.normalize("NFKD", text)
    text = "".join(ch for ch in text if not unicodedata.combining(ch))
    text = text.casefold()
    return _WS_RE.sub(" ", text).strip()


def normalize_slug(slug: str) -> str:
    """Slugs compare against free text with hyphens treated as spaces."""
    return normalize_label(slug.replace("-", " "))
