"""Synthetic parallel treebanks in CoNLL-U for end-to-end tests."""

from __future__ import annotations

import random
from pathlib import Path

ROSTER = {
    "Turkic": ["turkish"],
    "Indo-European": [
        "czech", "english", "french", "german", "hindi", "icelandic",
        "italian", "polish", "portuguese", "russian", "spanish",
    ],
    "Japonic": ["japanese"],
    "Koreanic": ["korean"],
    "Sino-Tibetan": ["chinese"],
    "Tai-Kadai": ["thai"],
    "Uralic": ["finnish"],
}
# present in the treebanks, absent from the length table
UNMATCHED = ["arabic", "indonesian", "swedish"]


def languages() -> list[str]:
    return [lang for langs in ROSTER.values() for lang in langs]


def lengths_csv() -> str:
    lines = ["language,family,L_s,L_p"]
    rng = random.Random(5)
    for fam, langs in ROSTER.items():
        for lang in langs:
            L_s = round(rng.uniform(1.4, 2.8), 3)
            lines.append(f"{lang},{fam},{L_s},{round(L_s * rng.uniform(2.0, 2.6), 3)}")
    return "\n".join(lines) + "\n"


def _sentence(rng: random.Random, n_words: int, n_punct: int) -> list[tuple[str, int]]:
    """Random tree over words plus trailing punctuation; returns (upos, head) rows."""
    order = list(range(n_words))
    rng.shuffle(order)
    pos = {w: i + 1 for i, w in enumerate(order)}  # word -> surface position
    rows = [None] * n_words
    for w in range(n_words):
        rows[pos[w] - 1] = ("NOUN", 0 if w == 0 else pos[rng.randrange(w)])
    root_pos = pos[0]
    rows += [("PUNCT", root_pos)] * n_punct
    return rows


def conllu(rows_by_sentence: list[tuple[str, list[tuple[str, int]]]]) -> str:
    out = []
    for sid, rows in rows_by_sentence:
        out.append(f"# sent_id = {sid}")
        for i, (upos, head) in enumerate(rows, start=1):
            rel = "root" if head == 0 else ("punct" if upos == "PUNCT" else "dep")
            out.append(f"{i}\tw{i}\t_\t{upos}\t_\t_\t{head}\t{rel}\t_\t_")
        out.append("")
    return "\n".join(out) + "\n"


def write_corpus(root: Path, n_sentences: int = 10, seed: int = 0) -> dict[str, Path]:
    """Write UD and SUD directories plus a length table under ``root``.

    Sentence s1 is degenerate in one language and s_extra exists in only
    one language, so reparallelization has something to remove.
    """
    root = Path(root)
    paths = {"ud": root / "ud", "sud": root / "sud", "lengths": root / "lengths.csv"}
    rng = random.Random(seed)
    langs = languages() + UNMATCHED
    for style in ("ud", "sud"):
        paths[style].mkdir(parents=True, exist_ok=True)
        for k, lang in enumerate(langs):
            sents = []
            for s in range(1, n_sentences + 1):
                n_words = 2 if (s == 1 and k == 0) else rng.randint(4, 11)
                sents.append((f"s{s}", _sentence(rng, n_words, rng.randint(0, 2))))
            if k == 1:
                sents.append(("s_extra", _sentence(rng, 6, 1)))
            (paths[style] / f"{lang}.conllu").write_text(conllu(sents), encoding="utf-8")
    paths["lengths"].write_text(lengths_csv(), encoding="utf-8")
    return paths
