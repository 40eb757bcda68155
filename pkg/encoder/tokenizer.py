"""
Subword Tokenizer

Wordpiece-style vocabulary with greedy longest-match tokenization and
"##" continuation pieces. Reserved ids: [SPEC1]=0, [SPEC2]=1, [UNK]=2.
"""

from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Union

from config.constants import CONTINUATION_PREFIX, RESERVED_TOKENS, SPEC1_TOKEN, SPEC2_TOKEN, UNK_TOKEN
from utils.errors import ArtifactIOError, DataValidationError

PathLike = Union[str, Path]


class SubwordVocabulary:
    """Token string <-> id mapping; reserved tokens come first"""

    def __init__(self, tokens: Iterable[str]):
        self.id_to_token: List[str] = list(RESERVED_TOKENS)
        self.token_to_id: Dict[str, int] = {tok: i for i, tok in enumerate(RESERVED_TOKENS)}
        for token in tokens:
            if not token:
                raise DataValidationError("Empty token in vocabulary")
            if token in self.token_to_id:
                raise DataValidationError(f"Duplicate vocabulary token '{token}'")
            self.token_to_id[token] = len(self.id_to_token)
            self.id_to_token.append(token)

    @property
    def spec1_id(self) -> int:
        return self.token_to_id[SPEC1_TOKEN]

    @property
    def spec2_id(self) -> int:
        return self.token_to_id[SPEC2_TOKEN]

    @property
    def unk_id(self) -> int:
        return self.token_to_id[UNK_TOKEN]

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def regular_tokens(self) -> List[str]:
        return self.id_to_token[len(RESERVED_TOKENS):]

    @classmethod
    def from_file(cls, path: PathLike) -> "SubwordVocabulary":
        """Load a vocabulary file (one token per line, ids after the reserved tokens)."""
        path = Path(path)
        try:
            with path.open("r", encoding="utf-8") as f:
                tokens = [line.rstrip("\n") for line in f if line.rstrip("\n")]
        except OSError as e:
            raise ArtifactIOError(f"Cannot read vocabulary {path}: {e}") from e
        return cls(tokens)

    def to_file(self, path: PathLike) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8", newline="\n") as f:
                for token in self.regular_tokens():
                    f.write(token + "\n")
        except OSError as e:
            raise ArtifactIOError(f"Cannot write vocabulary {path}: {e}") from e
        return path


def tokenize(word: str, vocab: SubwordVocabulary) -> List[int]:
    """
    Greedy longest-match subword ids for a single word.

    The longest vocabulary prefix is taken at each position; pieces after
    the first carry the "##" prefix. If any position cannot be matched, the
    whole word becomes one [UNK].

    Args:
        word: Word without whitespace
        vocab: Subword vocabulary

    Returns:
        List of token ids
    """
    if word in vocab:
        return [vocab.token_to_id[word]]

    ids = []
    start = 0
    while start < len(word):
        end = len(word)
        match = None
        while start < end:
            piece = word[start:end]
            if start > 0:
                piece = CONTINUATION_PREFIX + piece
            if piece in vocab:
                match = vocab.token_to_id[piece]
                break
            end -= 1
        if match is None:
            return [vocab.unk_id]
        ids.append(match)
        start = end
    return ids


def tokenize_text(text: str, vocab: SubwordVocabulary) -> List[int]:
    """Whitespace-split a text, then tokenize each piece."""
    ids = []
    for piece in text.split():
        ids.extend(tokenize(piece, vocab))
    return ids


def ids_to_tokens(ids: Sequence[int], vocab: SubwordVocabulary) -> List[str]:
    return [vocab.id_to_token[i] for i in ids]
