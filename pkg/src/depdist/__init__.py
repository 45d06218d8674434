"""Dependency-distance optimality (Omega, D) versus word length across languages."""

from .arrangements import (
    ArrangementResult,
    maxla_bruteforce,
    minla_bruteforce,
    minla_exact,
    minla_projective,
    random_arrangement,
)
from .preprocess import ParallelCollection, Style, reparallelize, strip_punctuation
from .scores import mean_field_distance, omega, sentence_scores, treebank_summary
from .treebank_io import (
    LanguageLengths,
    Token,
    load_word_lengths,
    parse_conllu,
    read_head_vectors,
    to_head_vector,
    write_head_vectors,
)
from .trees import (
    Arrangement,
    DependencyTree,
    expected_D_random,
    sum_dependency_distances,
    tree_from_head_vector,
)

__version__ = "0.1.0"
