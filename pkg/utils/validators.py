"""
Input Validators

Validation functions for words, glosses, language codes and synset ids.
"""

import re
from typing import Optional, Tuple

_LANG_CODE = re.compile(r'^[a-z]{2,3}$')
_WHITESPACE = re.compile(r'\s')


def validate_language_code(code: str) -> Tuple[bool, Optional[str]]:
    """
    Validate an ISO-639 language code.

    Two-letter codes are the norm; three-letter codes (e.g. "yue") are
    accepted for languages without a two-letter code.

    Args:
        code: Language code

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not code:
        return False, "Language code is required"

    if not _LANG_CODE.match(code):
        return False, f"Invalid language code '{code}' (expected 2-3 lowercase letters)"

    return True, None


def validate_word(word: str) -> Tuple[bool, Optional[str]]:
    """
    Validate a single-token word (lemma or constraint word).

    Args:
        word: Word text

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not word:
        return False, "Word cannot be empty"

    if _WHITESPACE.search(word):
        return False, f"Word '{word}' contains whitespace"

    return True, None


def validate_tab_free(text: str, field: str) -> Tuple[bool, Optional[str]]:
    """
    Validate that a TSV field contains no tab or newline.

    Args:
        text: Field text
        field: Field name used in the error message

    Returns:
        Tuple of (is_valid, error_message)
    """
    if '\t' in text or '\n' in text or '\r' in text:
        return False, f"Field '{field}' contains a tab or newline: {text!r}"

    return True, None


def validate_synset_id(synset_id: str) -> Tuple[bool, Optional[str]]:
    """
    Validate an opaque synset id.

    Args:
        synset_id: Synset identifier (e.g. "bn:00064584n")

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not synset_id or not synset_id.strip():
        return False, "Synset id cannot be empty"

    if _WHITESPACE.search(synset_id):
        return False, f"Synset id '{synset_id}' contains whitespace"

    return True, None


def contains_whitespace(text: str) -> bool:
    """True if the text contains any whitespace character."""
    return bool(_WHITESPACE.search(text))
