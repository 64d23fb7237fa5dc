"""Curvature-regularized binary segmentation."""

from ._core import (
    CurvsegError,
    brute_force,
    corpus_case,
    corpus_names,
    curvature_edges,
    dice,
    export_corpus,
    load_image,
    load_seeds,
    segment,
    solve_energy,
    solve_qpbo,
)

__all__ = [
    "CurvsegError",
    "brute_force",
    "corpus_case",
    "corpus_names",
    "curvature_edges",
    "dice",
    "export_corpus",
    "load_image",
    "load_seeds",
    "segment",
    "solve_energy",
    "solve_qpbo",
]
