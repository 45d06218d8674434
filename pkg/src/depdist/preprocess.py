"""Punctuation removal and reparallelization of parallel treebanks."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .errors import NoParallelSentencesError
from .treebank_io import PUNCT, Token, to_head_vector
from .trees import HeadVector

DEFAULT_MIN_LEN = 3


class Style(str, Enum):
    UD = "UD"
    SUD = "SUD"

    @property
    def collection(self) -> str:
        return "PUD" if self is Style.UD else "PSUD"


@dataclass
class ParallelCollection:
    """Per-language ordered ``(sentence_id, head vector)`` lists."""

    languages: dict[str, list[tuple[str, HeadVector]]]
    style: Style = Style.UD

    def sentence_ids(self, language: str) -> list[str]:
        return [sid for sid, _ in self.languages[language]]

    def is_parallel(self) -> bool:
        seqs = [self.sentence_ids(lang) for lang in self.languages]
        return all(s == seqs[0] for s in seqs[1:])


@dataclass
class LanguageReport:
    removed_tokens: int = 0
    degenerate_sentences: int = 0
    dropped_sentences: int = 0
    final_sentences: int = 0


@dataclass
class PreprocessReport:
    languages: dict[str, LanguageReport] = field(default_factory=dict)

    def rows(self, style: Style) -> list[dict]:
        return [
            {
                "style": style.value,
                "language": lang,
                "removed_tokens": r.removed_tokens,
                "degenerate_sentences": r.degenerate_sentences,
                "dropped_sentences": r.dropped_sentences,
                "final_sentences": r.final_sentences,
            }
            for lang, r in sorted(self.languages.items())
        ]


def strip_punctuation(sentence: Sequence[Token], policy: str = "reattach") -> list[Token]:
    """Remove PUNCT tokens and re-index the remaining words.

    With ``policy="reattach"`` a word whose head is removed is attached to
    its nearest non-punctuation ancestor.  If the root itself is
    punctuation, the first orphaned word becomes the new root and the other
    orphans attach to it.  With ``policy="drop"`` any word attached to a
    punctuation token makes the whole sentence degenerate.

    Returns an empty list for a degenerate sentence.
    """
    if policy not in ("reattach", "drop"):
        raise ValueError(f"unknown punctuation policy {policy!r}")
    n = len(sentence)
    is_punct = [False] + [t.upos == PUNCT for t in sentence]
    if not any(is_punct):
        return list(sentence)
    if all(is_punct[1:]):
        return []

    new_index = {}
    for i in range(1, n + 1):
        if not is_punct[i]:
            new_index[i] = len(new_index) + 1

    def anchor(i: int) -> int:
        h = sentence[i - 1].head
        while h and is_punct[h]:
            h = sentence[h - 1].head
        return h

    heads = {}
    for i in new_index:
        h = sentence[i - 1].head
        if h and is_punct[h] and policy == "drop":
            return []
        heads[i] = anchor(i)
    orphans = [i for i in new_index if heads[i] == 0]
    new_root = orphans[0]
    for i in orphans[1:]:
        heads[i] = new_root

    return [
        Token(
            form=sentence[i - 1].form,
            upos=sentence[i - 1].upos,
            head=new_index[heads[i]] if heads[i] else 0,
            deprel="root" if heads[i] == 0 else sentence[i - 1].deprel,
        )
        for i in new_index
    ]


def strip_collection(
    treebanks: Mapping[str, Sequence[tuple[str, Sequence[Token]]]],
    style: Style = Style.UD,
    min_len: int = DEFAULT_MIN_LEN,
    policy: str = "reattach",
) -> tuple[ParallelCollection, dict[str, set[str]], PreprocessReport]:
    """Strip punctuation in every language and collect degenerate sentence ids.

    A sentence is degenerate when fewer than ``min_len`` words remain.
    """
    languages: dict[str, list[tuple[str, HeadVector]]] = {}
    degenerate: dict[str, set[str]] = {}
    report = PreprocessReport()
    for lang, sentences in treebanks.items():
        rep = report.languages.setdefault(lang, LanguageReport())
        kept = []
        bad = set()
        for sid, toks in sentences:
            stripped = strip_punctuation(toks, policy)
            rep.removed_tokens += sum(t.upos == PUNCT for t in toks)
            if len(stripped) < min_len:
                bad.add(sid)
                continue
            kept.append((sid, to_head_vector(stripped, sid)))
        rep.degenerate_sentences = len(bad)
        languages[lang] = kept
        degenerate[lang] = bad
    return ParallelCollection(languages, style), degenerate, report


def reparallelize(
    collection: ParallelCollection,
    degenerate: Mapping[str, set[str]] | None = None,
    report: PreprocessReport | None = None,
) -> tuple[ParallelCollection, PreprocessReport]:
    """Keep only sentence ids present, and non-degenerate, in every language.

    Surviving sentences follow the order of the first language (by name).
    """
    degenerate = degenerate or {}
    report = report or PreprocessReport()
    langs = sorted(collection.languages)
    if not langs:
        raise NoParallelSentencesError()
    bad = set().union(*degenerate.values()) if degenerate else set()
    shared = None
    for lang in langs:
        ids = set(collection.sentence_ids(lang))
        shared = ids if shared is None else shared & ids
    shared -= bad
    if not shared:
        raise NoParallelSentencesError()

    reference = [sid for sid in collection.sentence_ids(langs[0]) if sid in shared]
    out = {}
    for lang in langs:
        by_id = dict(collection.languages[lang])
        out[lang] = [(sid, by_id[sid]) for sid in reference]
        rep = report.languages.setdefault(lang, LanguageReport())
        rep.dropped_sentences = len(collection.languages[lang]) - len(reference)
        rep.final_sentences = len(reference)
    return ParallelCollection(out, collection.style), report
