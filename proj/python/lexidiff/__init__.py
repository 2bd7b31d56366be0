"""Lexical similarity by graph diffusion over phonetic distances."""

from lexidiff._core import (
    ContractViolation,
    Dataset,
    ValidationError,
    calibrate,
    classify,
    diffusion_intensity,
    inventory_stats,
    load_dataset,
    nmwd,
    pca,
    phoneme_distance,
    substitution_weight,
    tokenize,
    translation_distance,
    word_distance,
)

__all__ = [
    "ContractViolation",
    "Dataset",
    "ValidationError",
    "calibrate",
    "classify",
    "diffusion_intensity",
    "inventory_stats",
    "load_dataset",
    "nmwd",
    "pca",
    "phoneme_distance",
    "substitution_weight",
    "tokenize",
    "translation_distance",
    "word_distance",
]

__version__ = "0.1.0"
