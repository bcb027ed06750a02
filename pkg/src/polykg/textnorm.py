"""Text normalization and tokenization shared across the toolkit."""

from __future__ import annotations

import unicodedata

# scripts written without word separators get character-unigram tokens
UNSEGMENTED_SCRIPTS = frozenset({"zh", "ja", "th"})


def normalize(text: str, lang: str = "en") -> str:
    """Canonicalize a name or description for matching.

    Unicode compatibility normalization plus case folding, iterated to a
    fixed point (compatibility folds such as '㎒' -> 'MHz' can re-introduce
    case), then whitespace trimmed and collapsed to single spaces. Caseless
    scripts pass through the fold unchanged.
    """
    folded = unicodedata.normalize("NFKC", text.casefold())
    for _ in range(3):
        again = unicodedata.normalize("NFKC", folded.casefold())
        if again == folded:
            break
        folded = again
    return " ".join(folded.split())


def tokenize(text: str, lang: str = "en") -> list[str]:
    """Normalized tokens: whitespace-split words, or character unigrams for zh/ja/th."""
    norm = normalize(text, lang)
    if lang in UNSEGMENTED_SCRIPTS:
        return [ch for ch in norm if not ch.isspace()]
    return norm.split()
