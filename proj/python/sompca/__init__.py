"""Semi-orthogonal multilinear PCA: tensor-to-vector feature learning."""

from ._sompca import (
    Model,
    train,
    synth,
    select_nu,
    max_features,
    nn_classify,
    recognition_rate,
    split_protocol,
    load_dataset,
    save_dataset,
    ShapeError,
    ArgumentError,
    FileFormatError,
    __version__,
)

__all__ = [
    "Model",
    "train",
    "synth",
    "select_nu",
    "max_features",
    "nn_classify",
    "recognition_rate",
    "split_protocol",
    "load_dataset",
    "save_dataset",
    "ShapeError",
    "ArgumentError",
    "FileFormatError",
    "__version__",
]
