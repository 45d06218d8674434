"""Reading CoNLL-U and head-vector treebanks, and the word-length table."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, Mapping, Sequence, TextIO

from .errors import InvalidTreeError, ParseError, ValidationError
from .trees import HeadVector, validate_heads

logger = logging.getLogger(__name__)

PUNCT = "PUNCT"


@dataclass(frozen=True)
class Token:
    form: str
    upos: str
    head: int
    deprel: str


@dataclass(frozen=True)
class LanguageLengths:
    """Mean word length of a language in syllables (L_s) and phonemes (L_p)."""

    language: str
    family: str
    L_s: float
    L_p: float


def _text(stream: BinaryIO | TextIO | bytes | str) -> TextIO:
    if isinstance(stream, bytes):
        return io.StringIO(stream.decode("utf-8-sig"))
    if isinstance(stream, str):
        return io.StringIO(stream)
    if isinstance(stream, io.TextIOBase):
        return stream
    return io.TextIOWrapper(stream, encoding="utf-8-sig")


def parse_conllu(stream) -> list[tuple[str, list[Token]]]:
    """Parse CoNLL-U into ``(sentence_id, tokens)`` pairs.

    Multiword-token ranges (``4-5``) and empty nodes (``4.1``) are skipped.
    Sentences without a ``# sent_id`` comment get their running index
    (starting at 1) as identifier.
    """
    sentences: list[tuple[str, list[Token]]] = []
    tokens: list[Token] = []
    sent_id: str | None = None

    def flush():
        nonlocal tokens, sent_id
        if tokens:
            sentences.append((sent_id if sent_id is not None else str(len(sentences) + 1), tokens))
        tokens = []
        sent_id = None

    for lineno, raw in enumerate(_text(stream), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep and key.strip() == "sent_id":
                sent_id = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ParseError(f"expected 10 tab-separated columns, found {len(cols)}", lineno)
        tid = cols[0]
        if "-" in tid or "." in tid:
            continue
        try:
            idx = int(tid)
        except ValueError:
            raise ParseError(f"non-integer ID {tid!r}", lineno) from None
        if idx != len(tokens) + 1:
            raise ParseError(f"word ID {idx} out of sequence", lineno)
        try:
            head = int(cols[6])
        except ValueError:
            raise ParseError(f"non-integer HEAD {cols[6]!r}", lineno) from None
        tokens.append(Token(form=cols[1], upos=cols[3], head=head, deprel=cols[7]))
    flush()
    return sentences


def to_head_vector(sentence: Sequence[Token], sentence_id: str | None = None) -> HeadVector:
    return validate_heads([t.head for t in sentence], sentence_id)


def read_head_vectors(stream) -> list[HeadVector]:
    """One sentence per line, space-separated heads, 0 for the root."""
    out = []
    for lineno, raw in enumerate(_text(stream), start=1):
        fields = raw.split()
        if not fields:
            raise ParseError("empty sentence", lineno)
        try:
            heads = [int(f) for f in fields]
        except ValueError as exc:
            raise ParseError(f"non-integer head ({exc})", lineno) from None
        try:
            out.append(validate_heads(heads))
        except InvalidTreeError as exc:
            raise ParseError(str(exc), lineno) from None
    return out


def write_head_vectors(heads: Iterable[Sequence[int]], stream: TextIO) -> None:
    for hv in heads:
        stream.write(" ".join(str(h) for h in hv))
        stream.write("\n")


def dumps_head_vectors(heads: Iterable[Sequence[int]]) -> str:
    buf = io.StringIO()
    write_head_vectors(heads, buf)
    return buf.getvalue()


def load_aliases(stream) -> dict[str, str]:
    """Alias table with header ``alias,canonical``; keys and values lower-cased."""
    reader = csv.DictReader(_text(stream))
    if reader.fieldnames is None or {"alias", "canonical"} - set(reader.fieldnames):
        raise ParseError("alias table needs header 'alias,canonical'", 1)
    return {row["alias"].strip().lower(): row["canonical"].strip().lower() for row in reader}


def canonical_language(name: str, aliases: Mapping[str, str] | None = None) -> str:
    key = name.strip().lower()
    if aliases:
        return aliases.get(key, key)
    return key


def load_word_lengths(stream, aliases: Mapping[str, str] | None = None) -> list[LanguageLengths]:
    """Read ``language,family,L_s,L_p`` rows, enforcing ``L_p >= L_s > 0``."""
    reader = csv.DictReader(_text(stream))
    required = ["language", "family", "L_s", "L_p"]
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != required:
        raise ParseError(f"word-length table needs header {','.join(required)}", 1)
    records = []
    seen = set()
    for lineno, row in enumerate(reader, start=2):
        try:
            L_s = float(row["L_s"])
            L_p = float(row["L_p"])
        except (TypeError, ValueError):
            raise ParseError("non-numeric word length", lineno) from None
        if not L_s > 0 or not L_p > 0:
            raise ValidationError(f"line {lineno}: word lengths must be positive")
        if L_p < L_s:
            raise ValidationError(f"line {lineno}: L_p={L_p} < L_s={L_s}")
        family = (row["family"] or "").strip()
        if not family:
            raise ValidationError(f"line {lineno}: empty family")
        language = canonical_language(row["language"], aliases)
        if language in seen:
            raise ValidationError(f"line {lineno}: duplicate language {language!r}")
        seen.add(language)
        records.append(LanguageLengths(language, family, L_s, L_p))
    return records


def iter_conllu_head_vectors(stream) -> Iterator[tuple[str, HeadVector]]:
    for sid, toks in parse_conllu(stream):
        yield sid, to_head_vector(toks, sid)
