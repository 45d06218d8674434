"""End-to-end driver: preprocess -> score -> analyze, writing CSV reports."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import BootstrapError, ConvergenceError, DepDistError, ParseError, SingularDesignError
from .preprocess import (
    DEFAULT_MIN_LEN,
    LanguageReport,
    ParallelCollection,
    PreprocessReport,
    Style,
    reparallelize,
    strip_collection,
)
from .scores import TreebankSummary, treebank_summary
from .stats.bootstrap import BootstrapCI, bootstrap_ci
from .stats.kendall import EXACT_MAX_N, CorrelationResult, kendall_tau_b
from .stats.lmm import AicSelection, LmmFit, aic_select, fit_lmm
from .treebank_io import (
    LanguageLengths,
    canonical_language,
    dumps_head_vectors,
    load_aliases,
    load_word_lengths,
    parse_conllu,
    read_head_vectors,
)
from .trees import DependencyTree

logger = logging.getLogger(__name__)

DISTANCES = ("omega", "D")
LENGTHS = ("L_s", "L_p")
DISTANCE_LABEL = {"omega": "Omega", "D": "D"}
SUMMARY_FIELDS = ["language", "style", "mean_omega", "mean_D", "sentences_used", "sentences_skipped"]
REPORT_FIELDS = ["style", "language", "removed_tokens", "degenerate_sentences", "dropped_sentences", "final_sentences"]


class StageError(DepDistError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")


@dataclass
class RunConfig:
    out: Path
    ud_dir: Path | None = None
    sud_dir: Path | None = None
    lengths: Path | None = None
    aliases: Path | None = None
    min_len: int = DEFAULT_MIN_LEN
    boot_b: int = 1000
    seed: int = 0
    criterion: str = "ml"
    minla: str = "unconstrained"
    punct_policy: str = "reattach"
    alpha: float = 0.05
    exact_max_n: int = EXACT_MAX_N
    continuity: bool = True
    expected_sign: Mapping[str, int] = field(default_factory=lambda: {"omega": -1, "D": 1})

    def style_dirs(self) -> dict[Style, Path]:
        dirs = {}
        if self.ud_dir is not None:
            dirs[Style.UD] = Path(self.ud_dir)
        if self.sud_dir is not None:
            dirs[Style.SUD] = Path(self.sud_dir)
        return dirs

    def check_paths(self, need_treebanks: bool = True, need_lengths: bool = True) -> None:
        """Fail fast on unreadable inputs."""
        if need_treebanks and not self.style_dirs():
            raise DepDistError("no treebank directory given (--ud-dir/--sud-dir)")
        for d in self.style_dirs().values():
            if not d.is_dir():
                raise DepDistError(f"treebank directory not found: {d}")
        if need_lengths:
            if self.lengths is None:
                raise DepDistError("word-length table not given (--lengths)")
            if not Path(self.lengths).is_file():
                raise DepDistError(f"word-length table not found: {self.lengths}")
        if self.aliases is not None and not Path(self.aliases).is_file():
            raise DepDistError(f"alias table not found: {self.aliases}")
        if self.criterion not in ("ml", "reml"):
            raise DepDistError(f"unknown likelihood criterion {self.criterion!r}")


# --------------------------------------------------------------------------
# CSV helpers


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def write_csv(path: Path, fieldnames: Sequence[str], rows: Iterable[Mapping]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fieldnames)
        for row in rows:
            w.writerow([_fmt(row.get(f)) for f in fieldnames])


def read_summaries(path: Path) -> list[TreebankSummary]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SUMMARY_FIELDS:
            raise ParseError(f"{path}: expected header {','.join(SUMMARY_FIELDS)}", 1)
        return [
            TreebankSummary(
                language=r["language"],
                style=Style(r["style"]),
                mean_omega=float(r["mean_omega"]),
                mean_D=float(r["mean_D"]),
                sentences_used=int(r["sentences_used"]),
                sentences_skipped=int(r["sentences_skipped"]),
            )
            for r in reader
        ]


def _read_aliases(path: Path | None) -> dict[str, str]:
    if path is None:
        return {}
    with open(path, "rb") as fh:
        return load_aliases(fh)


def read_lengths(path: Path, aliases_path: Path | None = None) -> list[LanguageLengths]:
    aliases = _read_aliases(aliases_path)
    with open(path, "rb") as fh:
        return load_word_lengths(fh, aliases)


# --------------------------------------------------------------------------
# preprocess / score


def _language_files(directory: Path) -> tuple[str, list[Path]]:
    conllu = sorted(directory.glob("*.conllu"))
    if conllu:
        return "conllu", conllu
    heads = sorted(directory.glob("*.heads"))
    if heads:
        return "heads", heads
    raise DepDistError(f"{directory}: no *.conllu or *.heads files")


def load_style_dir(
    directory: Path,
    style: Style,
    aliases: Mapping[str, str] | None = None,
    min_len: int = DEFAULT_MIN_LEN,
    policy: str = "reattach",
) -> tuple[ParallelCollection, PreprocessReport]:
    """Load one annotation style and return its reparallelized collection.

    CoNLL-U input has punctuation stripped first; head-vector input is taken
    as already preprocessed, sentences being identified by line number.
    """
    kind, files = _language_files(Path(directory))
    by_lang: dict[str, Path] = {}
    for f in files:
        lang = canonical_language(f.stem, aliases)
        if lang in by_lang:
            raise DepDistError(f"two treebanks map to language {lang!r}: {by_lang[lang]}, {f}")
        by_lang[lang] = f

    if kind == "conllu":
        treebanks = {}
        for lang, f in sorted(by_lang.items()):
            with open(f, "rb") as fh:
                try:
                    treebanks[lang] = parse_conllu(fh)
                except ParseError as exc:
                    raise ParseError(f"{f}: {exc}") from None
        collection, degenerate, report = strip_collection(treebanks, style, min_len, policy)
    else:
        languages = {}
        degenerate = {}
        report = PreprocessReport()
        for lang, f in sorted(by_lang.items()):
            with open(f, "rb") as fh:
                try:
                    hvs = read_head_vectors(fh)
                except ParseError as exc:
                    raise ParseError(f"{f}: {exc}") from None
            languages[lang] = [(str(i), hv) for i, hv in enumerate(hvs, start=1)]
            degenerate[lang] = {str(i) for i, hv in enumerate(hvs, start=1) if len(hv) < min_len}
            report.languages[lang] = LanguageReport(degenerate_sentences=len(degenerate[lang]))
        collection = ParallelCollection(languages, style)
    return reparallelize(collection, degenerate, report)


def write_collection(collection: ParallelCollection, directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for lang, sentences in sorted(collection.languages.items()):
        (directory / f"{lang}.heads").write_text(dumps_head_vectors(hv for _, hv in sentences), encoding="utf-8")


def score_collection(
    collection: ParallelCollection, min_len: int = DEFAULT_MIN_LEN, minla: str = "unconstrained"
) -> list[TreebankSummary]:
    return [
        treebank_summary(
            (DependencyTree(hv) for _, hv in sentences),
            lang,
            collection.style,
            min_len=min_len,
            minla=minla,
        )
        for lang, sentences in sorted(collection.languages.items())
    ]


def summary_rows(summaries: Iterable[TreebankSummary]) -> list[dict]:
    return [s.row() for s in sorted(summaries, key=lambda s: (s.style.value, s.language))]


# --------------------------------------------------------------------------
# analysis


@dataclass
class JoinedData:
    style: Style
    languages: list[str]
    families: list[str]
    x: dict[str, list[float]]  # distance score -> values
    y: dict[str, list[float]]  # length unit -> values


def join(
    summaries: Sequence[TreebankSummary], lengths: Sequence[LanguageLengths], style: Style
) -> tuple[JoinedData, list[str]]:
    """Join one style's summaries with the length table; returns (data, dropped languages)."""
    table = {r.language: r for r in lengths}
    rows = sorted((s for s in summaries if s.style == style), key=lambda s: s.language)
    kept = [s for s in rows if s.language in table]
    dropped = [s.language for s in rows if s.language not in table]
    data = JoinedData(
        style=style,
        languages=[s.language for s in kept],
        families=[table[s.language].family for s in kept],
        x={"omega": [s.mean_omega for s in kept], "D": [s.mean_D for s in kept]},
        y={
            "L_s": [table[s.language].L_s for s in kept],
            "L_p": [table[s.language].L_p for s in kept],
        },
    )
    return data, dropped


def emit_figure_data(
    summaries: Sequence[TreebankSummary], lengths: Sequence[LanguageLengths], out: Path
) -> dict[Style, JoinedData]:
    """Write the plot-ready (x, L) pairs behind the Omega and D figures.

    One file per (score, style, length unit): ``figure1_omega_*`` for mean
    Omega and ``figure2_D_*`` for mean D.  Languages absent from the length
    table are listed in ``dropped_languages.txt``.
    """
    joined = {}
    dropped_all = set()
    for style in (Style.UD, Style.SUD):
        data, dropped = join(summaries, lengths, style)
        joined[style] = data
        dropped_all.update(dropped)
        if len(data.languages) < 3:
            logger.warning("%s: only %d languages joined with the length table", style.collection, len(data.languages))
        for fig, dist in (("figure1", "omega"), ("figure2", "D")):
            for unit in LENGTHS:
                rows = [
                    {"language": lang, "family": fam, "x": xv, "y": yv}
                    for lang, fam, xv, yv in zip(data.languages, data.families, data.x[dist], data.y[unit])
                ]
                write_csv(out / f"{fig}_{dist}_{style.collection}_{unit}.csv", ["language", "family", "x", "y"], rows)
    (out / "dropped_languages.txt").write_text("".join(f"{lang}\n" for lang in sorted(dropped_all)), encoding="utf-8")
    return joined


@dataclass
class CellResult:
    collection: str
    distance: str
    length: str
    correlation: CorrelationResult | None = None
    selection: AicSelection | None = None
    ci: BootstrapCI | None = None
    ci_error: str = ""
    fit_error: str = ""


def analyze_cell(data: JoinedData, distance: str, unit: str, config: RunConfig, null_fit: LmmFit | None) -> CellResult:
    cell = CellResult(data.style.collection, distance, unit)
    x, y, groups = data.x[distance], data.y[unit], data.families
    sign = config.expected_sign[distance]
    cell.correlation = kendall_tau_b(x, y, exact_max_n=config.exact_max_n, continuity=config.continuity)
    try:
        mixed = fit_lmm(y, x, groups, config.criterion)
    except (ConvergenceError, SingularDesignError) as exc:
        cell.fit_error = str(exc)
        return cell
    if null_fit is not None:
        cell.selection = aic_select(null_fit, mixed, expected_sign=sign)
    try:
        cell.ci = bootstrap_ci(mixed, x, groups, B=config.boot_b, level=1 - config.alpha, seed=config.seed)
    except BootstrapError as exc:
        cell.ci_error = str(exc)
        cell.ci = BootstrapCI(1 - config.alpha, math.nan, math.nan, exc.replicates, config.seed, exc.failures)
    return cell


def verdict(cell: CellResult, config: RunConfig) -> dict:
    sign = config.expected_sign[cell.distance]
    corr = cell.correlation
    corr_ok = corr is not None and corr.p_two_sided < config.alpha and (corr.tau > 0) == (sign > 0) and corr.tau != 0
    aic_ok = cell.selection is not None and cell.selection.prediction_confirmed
    ci_ok = None
    if cell.ci is not None and not math.isnan(cell.ci.lower):
        ci_ok = cell.ci.upper < 0 if sign < 0 else cell.ci.lower > 0
    return {
        "collection": cell.collection,
        "distance": DISTANCE_LABEL[cell.distance],
        "length": cell.length,
        "expected_sign": sign,
        "correlation_confirms": corr_ok,
        "aic_confirms": aic_ok,
        "ci_confirms": ci_ok,
        "prediction_confirmed": corr_ok and aic_ok,
        "caveat": "D lacks dual normalization" if cell.distance == "D" else "",
    }


def analyze(
    summaries: Sequence[TreebankSummary], lengths: Sequence[LanguageLengths], config: RunConfig
) -> list[CellResult]:
    """Correlation, model selection and bootstrap interval for every cell."""
    out = Path(config.out)
    joined = emit_figure_data(summaries, lengths, out)
    cells: list[CellResult] = []
    for distance in DISTANCES:
        for style in (Style.UD, Style.SUD):
            data = joined[style]
            if len(data.languages) < 3:
                continue
            for unit in LENGTHS:
                null_fit = fit_lmm(data.y[unit], None, data.families, config.criterion)
                cells.append(analyze_cell(data, distance, unit, config, null_fit))
    if not cells:
        raise DepDistError("fewer than 3 languages joined with the word-length table")
    _write_tables(cells, config)
    return cells


def _write_tables(cells: Sequence[CellResult], config: RunConfig) -> None:
    out = Path(config.out)
    write_csv(
        out / "correlations.csv",
        ["collection", "distance", "length", "n", "tau", "p"],
        [
            {
                "collection": c.collection,
                "distance": DISTANCE_LABEL[c.distance],
                "length": c.length,
                "n": c.correlation.n,
                "tau": c.correlation.tau,
                "p": c.correlation.p_two_sided,
            }
            for c in cells
        ],
    )
    write_csv(
        out / "aic.csv",
        ["collection", "distance", "length", "aic_mixed", "aic_null"],
        [
            {
                "collection": c.collection,
                "distance": DISTANCE_LABEL[c.distance],
                "length": c.length,
                "aic_mixed": c.selection.aic_mixed if c.selection else None,
                "aic_null": c.selection.aic_null if c.selection else None,
            }
            for c in cells
        ],
    )
    write_csv(
        out / "model_selection.csv",
        ["collection", "distance", "length", "delta_aic", "selected", "beta1", "sign_matches", "fit_error"],
        [
            {
                "collection": c.collection,
                "distance": DISTANCE_LABEL[c.distance],
                "length": c.length,
                "delta_aic": c.selection.delta_aic if c.selection else None,
                "selected": c.selection.selected if c.selection else None,
                "beta1": c.selection.beta1 if c.selection else None,
                "sign_matches": c.selection.sign_matches if c.selection else None,
                "fit_error": c.fit_error,
            }
            for c in cells
        ],
    )
    write_csv(
        out / "ci.csv",
        ["collection", "fixed_effect", "response", "lower", "upper"],
        [
            {
                "collection": c.collection,
                "fixed_effect": DISTANCE_LABEL[c.distance],
                "response": c.length,
                "lower": None if c.ci is None or math.isnan(c.ci.lower) else c.ci.lower,
                "upper": None if c.ci is None or math.isnan(c.ci.upper) else c.ci.upper,
            }
            for c in cells
        ],
    )
    write_csv(
        out / "ci_diagnostics.csv",
        ["collection", "fixed_effect", "response", "level", "replicates", "failures", "seed", "error"],
        [
            {
                "collection": c.collection,
                "fixed_effect": DISTANCE_LABEL[c.distance],
                "response": c.length,
                "level": c.ci.level if c.ci else None,
                "replicates": c.ci.replicates if c.ci else None,
                "failures": c.ci.failures if c.ci else None,
                "seed": c.ci.seed if c.ci else None,
                "error": c.ci_error or c.fit_error,
            }
            for c in cells
        ],
    )
    verdicts = [verdict(c, config) for c in cells]
    write_csv(out / "verdicts.csv", list(verdicts[0]), verdicts)
    for v in verdicts:
        logger.info(
            "%s %s~%s: prediction %s (correlation=%s, aic=%s, ci=%s)%s",
            v["collection"],
            v["length"],
            v["distance"],
            "CONFIRMED" if v["prediction_confirmed"] else "not confirmed",
            v["correlation_confirms"],
            v["aic_confirms"],
            v["ci_confirms"],
            f" [{v['caveat']}]" if v["caveat"] else "",
        )


def verdict_lines(out: Path) -> list[str]:
    with open(Path(out) / "verdicts.csv", newline="", encoding="utf-8") as fh:
        return [
            f"{r['collection']} {r['distance']} {r['length']}: "
            f"{'CONFIRMED' if r['prediction_confirmed'] == 'true' else 'not confirmed'}"
            + (f" ({r['caveat']})" if r["caveat"] else "")
            for r in csv.DictReader(fh)
        ]


# --------------------------------------------------------------------------
# stages


def run_preprocess(config: RunConfig) -> dict[Style, ParallelCollection]:
    aliases = _read_aliases(config.aliases)
    out = Path(config.out)
    collections = {}
    report_rows = []
    for style, directory in config.style_dirs().items():
        collection, report = load_style_dir(directory, style, aliases, config.min_len, config.punct_policy)
        write_collection(collection, out / style.value)
        collections[style] = collection
        report_rows.extend(report.rows(style))
    write_csv(out / "preprocess_report.csv", REPORT_FIELDS, report_rows)
    return collections


def run_score(config: RunConfig, collections: Mapping[Style, ParallelCollection] | None = None) -> list[TreebankSummary]:
    if collections is None:
        aliases = _read_aliases(config.aliases)
        collections = {
            style: load_style_dir(d, style, aliases, config.min_len, config.punct_policy)[0]
            for style, d in config.style_dirs().items()
        }
    summaries = []
    for style in sorted(collections, key=lambda s: s.value):
        summaries.extend(score_collection(collections[style], config.min_len, config.minla))
    write_csv(Path(config.out) / "summaries.csv", SUMMARY_FIELDS, summary_rows(summaries))
    return summaries


def run_analyze(config: RunConfig, summaries: Sequence[TreebankSummary] | None = None) -> list[CellResult]:
    if summaries is None:
        summaries = read_summaries(Path(config.out) / "summaries.csv")
    aliases = _read_aliases(config.aliases)
    summaries = [
        TreebankSummary(canonical_language(s.language, aliases), s.style, s.mean_omega, s.mean_D, s.sentences_used, s.sentences_skipped)
        for s in summaries
    ]
    lengths = read_lengths(Path(config.lengths), config.aliases)
    return analyze(summaries, lengths, config)


def run_pipeline(config: RunConfig) -> list[CellResult]:
    """Run every stage; any failure is re-raised as a stage-tagged :class:`StageError`."""
    try:
        config.check_paths()
    except DepDistError as exc:
        raise StageError("config", exc) from exc
    Path(config.out).mkdir(parents=True, exist_ok=True)
    try:
        collections = run_preprocess(config)
    except DepDistError as exc:
        raise StageError("preprocess", exc) from exc
    try:
        summaries = run_score(config, collections)
    except DepDistError as exc:
        raise StageError("score", exc) from exc
    try:
        return run_analyze(config, summaries)
    except DepDistError as exc:
        raise StageError("analyze", exc) from exc
