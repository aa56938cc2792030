"""Fit a statistical body model to front and side silhouettes."""

from ._core import (
    ConfigError,
    EmptySilhouetteError,
    Error,
    InvalidArgument,
    Model,
    ModelFormatError,
    ParseError,
    POSE_GENES,
    SHAPE_GENES,
    batch,
    build_model,
    evaluate,
    fit,
    load_model,
    measure,
    read_silhouette,
    render,
    synthesize,
    write_pbm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
